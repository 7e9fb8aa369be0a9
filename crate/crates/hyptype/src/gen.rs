//! Random and exhaustive generators for test inputs.
//!
//! Everything is deterministic given the seed.  The exhaustive enumeration of
//! stable weighted graphs of a fixed genus builds the trivalent weight-zero
//! graphs first and closes under single edge contractions; every stable graph
//! arises that way because any vertex of positive weight or high valence can
//! be resolved into a trivalent piece that contracts back onto it.

use std::collections::BTreeMap;

use rand::prelude::IndexedRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::{rat, ratio, EdgeId, Rat, TropicalCurve, VertexId, WeightedGraph};
use crate::iso::{dedup_graphs, graphs_isomorphic, invariant_key};

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// A random positive length: small integers and halves.
pub fn random_length(rng: &mut ChaCha8Rng) -> Rat {
    if rng.random_bool(0.25) {
        ratio(2 * rng.random_range(1..=6) - 1, 2)
    } else {
        rat(rng.random_range(1..=6))
    }
}

pub fn random_lengths(rng: &mut ChaCha8Rng, g: &WeightedGraph) -> TropicalCurve {
    let lengths: BTreeMap<EdgeId, Rat> =
        g.edge_ids().map(|e| (e, random_length(rng))).collect();
    TropicalCurve::new(g.clone(), lengths).unwrap()
}

/// Random stable curve of the requested genus with at most `max_edges` edges.
pub fn random_stable_curve(seed: u64, genus: u32, max_edges: usize) -> Result<TropicalCurve> {
    if genus < 2 {
        return Err(Error::Infeasible(format!(
            "stable curves need genus >= 2, requested {genus}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    for _ in 0..400 {
        let mut w_total = if rng.random_bool(0.6) {
            0
        } else {
            rng.random_range(0..=genus)
        };
        // Keep the cycle count within the edge budget.
        if (genus - w_total) as usize > max_edges {
            w_total = genus - max_edges as u32;
        }
        let b1 = genus - w_total;
        let graph = if b1 == 0 {
            let n = rng.random_range(1..=(max_edges + 1).min(2 * genus as usize));
            random_weighted_tree(&mut rng, n as u32, w_total)
        } else {
            let m = rng.random_range(b1 as usize..=max_edges);
            let n = m - b1 as usize + 1;
            random_connected_multigraph(&mut rng, n as u32, m as u32, w_total)
        };
        let curve = random_lengths(&mut rng, &graph);
        let Ok((model, _)) = curve.stable_model() else {
            continue;
        };
        if model.genus() == genus && model.graph().n_edges() <= max_edges {
            return Ok(model);
        }
    }
    Err(Error::Infeasible(format!(
        "no stable curve of genus {genus} with at most {max_edges} edges found"
    )))
}

fn random_weighted_tree(rng: &mut ChaCha8Rng, n: u32, w_total: u32) -> WeightedGraph {
    let mut weights: Vec<u32> = vec![0; n as usize];
    for _ in 0..w_total {
        let i = rng.random_range(0..n as usize);
        weights[i] += 1;
    }
    let vertices: Vec<(VertexId, u32)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (VertexId(i as u32), w))
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.random_range(0..i);
        edges.push((EdgeId(i - 1), VertexId(parent), VertexId(i)));
    }
    WeightedGraph::new(vertices, edges).unwrap()
}

fn random_connected_multigraph(
    rng: &mut ChaCha8Rng,
    n: u32,
    m: u32,
    w_total: u32,
) -> WeightedGraph {
    let mut weights: Vec<u32> = vec![0; n as usize];
    for _ in 0..w_total {
        let i = rng.random_range(0..n as usize);
        weights[i] += 1;
    }
    let vertices: Vec<(VertexId, u32)> = weights
        .iter()
        .enumerate()
        .map(|(i, &w)| (VertexId(i as u32), w))
        .collect();
    let mut edges = Vec::new();
    for i in 1..n {
        let parent = rng.random_range(0..i);
        edges.push((EdgeId(i - 1), VertexId(parent), VertexId(i)));
    }
    // Extra edges (loops allowed) bring the count up to m.
    for k in (n - 1)..m {
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        edges.push((EdgeId(k), VertexId(a), VertexId(b)));
    }
    WeightedGraph::new(vertices, edges).unwrap()
}

/// Random 2-connected loopless weight-zero multigraph built by open ear
/// additions on a starting cycle; at least `target_edges` edges (within 2).
pub fn random_biconnected_graph(seed: u64, target_edges: usize) -> WeightedGraph {
    let mut rng = rng_from_seed(seed);
    let target = target_edges.max(2);
    let k0 = rng.random_range(2..=4.min(target as u32)) as u32;
    let mut vertices: Vec<VertexId> = (0..k0).map(VertexId).collect();
    let mut next_v = k0;
    let mut next_e = 0;
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    for i in 0..k0 {
        edges.push((EdgeId(next_e), VertexId(i), VertexId((i + 1) % k0)));
        next_e += 1;
    }
    while edges.len() < target {
        let u = *vertices.as_slice().choose(&mut rng).unwrap();
        let w = loop {
            let w = *vertices.as_slice().choose(&mut rng).unwrap();
            if w != u {
                break w;
            }
        };
        let budget = target - edges.len();
        let p = rng.random_range(1..=3.min(budget as u32).max(1));
        let mut prev = u;
        for step in 0..p {
            let next = if step + 1 == p {
                w
            } else {
                let v = VertexId(next_v);
                next_v += 1;
                vertices.push(v);
                v
            };
            edges.push((EdgeId(next_e), prev, next));
            next_e += 1;
            prev = next;
        }
    }
    WeightedGraph::new(vertices.into_iter().map(|v| (v, 0)), edges).unwrap()
}

/// Random 2-connected series-parallel multigraph: a doubled edge expanded by
/// random subdivisions and parallel duplications.
pub fn random_sp_graph(seed: u64, steps: usize) -> WeightedGraph {
    let mut rng = rng_from_seed(seed);
    let mut g = WeightedGraph::new(
        [(VertexId(0), 0), (VertexId(1), 0)],
        [
            (EdgeId(0), VertexId(0), VertexId(1)),
            (EdgeId(1), VertexId(0), VertexId(1)),
        ],
    )
    .unwrap();
    for _ in 0..steps {
        let edges: Vec<EdgeId> = g.edge_ids().collect();
        let &target = edges.as_slice().choose(&mut rng).unwrap();
        if rng.random_bool(0.5) {
            let (next, _) = g.subdivide_edge(target).unwrap();
            g = next;
        } else {
            let (a, b) = g.ends(target);
            let fresh = g.fresh_edge_id();
            let vertices: Vec<_> = g.vertex_ids().map(|v| (v, g.weight(v))).collect();
            let mut es: Vec<_> = g
                .edge_ids()
                .map(|e| {
                    let (x, y) = g.ends(e);
                    (e, x, y)
                })
                .collect();
            es.push((fresh, a, b));
            g = WeightedGraph::new(vertices, es).unwrap();
        }
    }
    g
}

/// All trivalent weight-zero connected multigraphs of the given genus, up to
/// isomorphism.
pub fn enumerate_trivalent(genus: u32) -> Vec<WeightedGraph> {
    assert!(genus >= 2);
    let n = 2 * (genus - 1);
    let mut found: Vec<WeightedGraph> = Vec::new();
    let mut degrees = vec![3u32; n as usize];
    let mut edges: Vec<(u32, u32)> = Vec::new();
    enumerate_by_degrees(&mut degrees, &mut edges, (0, 0), &mut |edge_list| {
        let vertices = (0..n).map(|i| (VertexId(i), 0));
        let es = edge_list
            .iter()
            .enumerate()
            .map(|(i, &(a, b))| (EdgeId(i as u32), VertexId(a), VertexId(b)));
        if let Ok(g) = WeightedGraph::new(vertices, es) {
            if !found.iter().any(|h| graphs_isomorphic(h, &g)) {
                found.push(g);
            }
        }
    });
    found
}

/// Assign edges in nondecreasing lexicographic order of endpoint pairs so
/// every multiset appears exactly once.
fn enumerate_by_degrees(
    degrees: &mut Vec<u32>,
    edges: &mut Vec<(u32, u32)>,
    min_pair: (u32, u32),
    emit: &mut impl FnMut(&[(u32, u32)]),
) {
    let Some(a) = degrees.iter().position(|&d| d > 0) else {
        emit(edges);
        return;
    };
    let a = a as u32;
    // The smallest unsaturated vertex must be an endpoint of the next edge;
    // otherwise it can never be saturated again under the ordering.
    for b in a..degrees.len() as u32 {
        if (a, b) < min_pair {
            continue;
        }
        let need = if a == b { 2 } else { 1 };
        if degrees[a as usize] < need || degrees[b as usize] < if a == b { 2 } else { 1 } {
            continue;
        }
        if a != b && degrees[b as usize] == 0 {
            continue;
        }
        degrees[a as usize] -= 1;
        degrees[b as usize] -= 1;
        edges.push((a, b));
        enumerate_by_degrees(degrees, edges, (a, b), emit);
        edges.pop();
        degrees[a as usize] += 1;
        degrees[b as usize] += 1;
    }
}

/// All stable weighted graphs of the given genus up to isomorphism: the
/// trivalent ones together with everything reachable by edge contractions.
pub fn enumerate_stable_graphs(genus: u32) -> Vec<WeightedGraph> {
    let trivalent = enumerate_trivalent(genus);
    let mut all: Vec<WeightedGraph> = dedup_graphs(trivalent);
    let mut frontier: Vec<usize> = (0..all.len()).collect();
    while let Some(idx) = frontier.pop() {
        let g = all[idx].clone();
        for e in g.edge_ids() {
            let (contracted, _) = g.contract_edge(e).unwrap();
            debug_assert!(contracted.is_stable());
            let key = invariant_key(&contracted);
            let dup = all
                .iter()
                .any(|h| invariant_key(h) == key && graphs_isomorphic(h, &contracted));
            if !dup {
                all.push(contracted);
                frontier.push(all.len() - 1);
            }
        }
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn trivalent_counts() {
        // Genus 2: the theta graph and the dumbbell.
        assert_eq!(enumerate_trivalent(2).len(), 2);
        // Genus 3: five trivalent graphs.
        assert_eq!(enumerate_trivalent(3).len(), 5);
    }

    #[test]
    fn stable_graph_counts_match_moduli_strata() {
        // Stratum counts of the moduli of genus-g stable curves: 7 and 42.
        assert_eq!(enumerate_stable_graphs(2).len(), 7);
        assert_eq!(enumerate_stable_graphs(3).len(), 42);
    }

    #[test]
    fn random_stable_curves_hit_requested_genus() {
        for seed in 0..30 {
            let genus = 2 + (seed % 4) as u32;
            let c = random_stable_curve(seed, genus, 12).unwrap();
            assert_eq!(c.genus(), genus);
            assert!(c.is_stable());
            assert!(c.graph().n_edges() <= 12);
        }
    }

    #[test]
    fn random_biconnected_graphs_are_biconnected() {
        for seed in 0..30 {
            let g = random_biconnected_graph(seed, 4 + (seed as usize % 8));
            assert!(g.is_two_connected_shape(), "seed {seed}: {g:?}");
            assert!(g.edge_ids().all(|e| !g.is_loop(e)));
        }
    }

    #[test]
    fn random_sp_graphs_stay_loopless_and_biconnected() {
        for seed in 0..30 {
            let g = random_sp_graph(seed, 3 + (seed as usize % 9));
            assert!(g.is_two_connected_shape());
            assert!(g.edge_ids().all(|e| !g.is_loop(e)));
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a = random_stable_curve(7, 3, 10).unwrap();
        let b = random_stable_curve(7, 3, 10).unwrap();
        assert_eq!(a, b);
    }
}
