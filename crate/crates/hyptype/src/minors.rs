//! Minor containment with explicit models, and series-parallel reduction.
//!
//! A minor model maps pattern vertices to disjoint connected branch sets of
//! the host and pattern edges injectively to host edges running between the
//! right branch sets.  The search enumerates subsets of non-loop host edges
//! to contract; everything else is free deletion.  Series-parallel reduction
//! is kept deliberately separate from the minor search so the two can serve
//! as independent oracles for each other: a 2-connected loopless multigraph
//! reduces to a parallel pair exactly when it has no minor isomorphic to the
//! complete graph on four vertices.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{Block, EdgeId, VertexId, WeightedGraph};
use crate::iso::dedup_graphs;

const MAX_CONTRACTIBLE: usize = 16;

/// A certificate that `pattern` is a minor of `host`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinorModel {
    /// Pattern vertex to the connected host vertex set it contracts from.
    pub branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>>,
    /// Pattern edge to a distinct host edge joining the right branch sets.
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl MinorModel {
    pub fn verify(&self, host: &WeightedGraph, pattern: &WeightedGraph) -> Result<()> {
        let pv: BTreeSet<VertexId> = pattern.vertex_ids().collect();
        if self.branch_sets.keys().copied().collect::<BTreeSet<_>>() != pv {
            return Err(Error::Verification(
                "branch sets do not cover the pattern vertices".into(),
            ));
        }
        let mut seen: BTreeSet<VertexId> = BTreeSet::new();
        for (p, set) in &self.branch_sets {
            if set.is_empty() {
                return Err(Error::Verification(format!("empty branch set for {p}")));
            }
            for &v in set {
                if !host.has_vertex(v) {
                    return Err(Error::Verification(format!("unknown host vertex {v}")));
                }
                if !seen.insert(v) {
                    return Err(Error::Verification(format!(
                        "host vertex {v} used by two branch sets"
                    )));
                }
            }
            let internal: BTreeSet<EdgeId> = host
                .edge_ids()
                .filter(|&e| {
                    let (a, b) = host.ends(e);
                    set.contains(&a) && set.contains(&b)
                })
                .collect();
            if !host.connected_subgraph(set, &internal) {
                return Err(Error::Verification(format!(
                    "branch set for {p} is not connected"
                )));
            }
        }
        let pe: BTreeSet<EdgeId> = pattern.edge_ids().collect();
        if self.edge_map.keys().copied().collect::<BTreeSet<_>>() != pe {
            return Err(Error::Verification(
                "edge map does not cover the pattern edges".into(),
            ));
        }
        let images: BTreeSet<EdgeId> = self.edge_map.values().copied().collect();
        if images.len() != self.edge_map.len() {
            return Err(Error::Verification("edge map is not injective".into()));
        }
        for (&p, &h) in &self.edge_map {
            if !host.has_edge(h) {
                return Err(Error::Verification(format!("unknown host edge {h}")));
            }
            let (pa, pb) = pattern.ends(p);
            let (ha, hb) = host.ends(h);
            let sa = &self.branch_sets[&pa];
            let sb = &self.branch_sets[&pb];
            let straight = sa.contains(&ha) && sb.contains(&hb);
            let crossed = sa.contains(&hb) && sb.contains(&ha);
            if !straight && !crossed {
                return Err(Error::Verification(format!(
                    "host edge {h} does not join the branch sets of {p}"
                )));
            }
        }
        Ok(())
    }
}

pub fn has_minor(host: &WeightedGraph, pattern: &WeightedGraph) -> Result<bool> {
    Ok(find_minor_model(host, pattern)?.is_some())
}

/// Searches for a minor model of `pattern` inside `host`.  Vertex weights on
/// either side are ignored.
pub fn find_minor_model(
    host: &WeightedGraph,
    pattern: &WeightedGraph,
) -> Result<Option<MinorModel>> {
    let contractible: Vec<EdgeId> = host.edge_ids().filter(|&e| !host.is_loop(e)).collect();
    if contractible.len() > MAX_CONTRACTIBLE {
        return Err(Error::SizeGuard {
            what: "non-loop edges for minor search",
            limit: MAX_CONTRACTIBLE,
            found: contractible.len(),
        });
    }
    // Cheap impossibility checks.
    if pattern.n_vertices() > host.n_vertices()
        || pattern.n_edges() > host.n_edges()
        || pattern.betti1() > host.betti1()
    {
        return Ok(None);
    }

    let host_vertices: Vec<VertexId> = host.vertex_ids().collect();
    let vindex: BTreeMap<VertexId, usize> = host_vertices
        .iter()
        .enumerate()
        .map(|(i, &v)| (v, i))
        .collect();
    let pattern_vertices: Vec<VertexId> = pattern.vertex_ids().collect();

    // Pattern demands: loops per vertex, multiplicity per unordered pair.
    let mut p_loops: BTreeMap<VertexId, Vec<EdgeId>> = BTreeMap::new();
    let mut p_pairs: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for e in pattern.edge_ids() {
        let (a, b) = pattern.ends(e);
        if a == b {
            p_loops.entry(a).or_default().push(e);
        } else {
            p_pairs.entry((a.min(b), a.max(b))).or_default().push(e);
        }
    }
    let p_degree: BTreeMap<VertexId, usize> = pattern_vertices
        .iter()
        .map(|&v| {
            let d = p_pairs
                .iter()
                .filter(|((a, b), _)| *a == v || *b == v)
                .map(|(_, es)| es.len())
                .sum();
            (v, d)
        })
        .collect();

    for mask in 0u32..(1u32 << contractible.len()) {
        // Union-find over host vertices for the contracted subset.
        let mut parent: Vec<usize> = (0..host_vertices.len()).collect();
        fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for (k, &e) in contractible.iter().enumerate() {
            if mask >> k & 1 == 1 {
                let (a, b) = host.ends(e);
                let (ra, rb) = (find(&mut parent, vindex[&a]), find(&mut parent, vindex[&b]));
                parent[ra.max(rb)] = ra.min(rb);
            }
        }
        let comp_of: Vec<usize> = (0..host_vertices.len())
            .map(|i| find(&mut parent, i))
            .collect();
        let comps: BTreeSet<usize> = comp_of.iter().copied().collect();
        if comps.len() < pattern_vertices.len() {
            continue;
        }

        // Host supply after contraction: loops per component, edges per
        // component pair (only edges outside the contracted subset count).
        let mut h_loops: BTreeMap<usize, Vec<EdgeId>> = BTreeMap::new();
        let mut h_pairs: BTreeMap<(usize, usize), Vec<EdgeId>> = BTreeMap::new();
        for e in host.edge_ids() {
            if let Some(k) = contractible.iter().position(|&f| f == e) {
                if mask >> k & 1 == 1 {
                    continue;
                }
            }
            let (a, b) = host.ends(e);
            let (ca, cb) = (comp_of[vindex[&a]], comp_of[vindex[&b]]);
            if ca == cb {
                h_loops.entry(ca).or_default().push(e);
            } else {
                h_pairs.entry((ca.min(cb), ca.max(cb))).or_default().push(e);
            }
        }

        // Assign pattern vertices to distinct components.
        let mut assignment: BTreeMap<VertexId, usize> = BTreeMap::new();
        if assign(
            &pattern_vertices,
            0,
            &comps,
            &p_loops,
            &p_pairs,
            &p_degree,
            &h_loops,
            &h_pairs,
            &mut assignment,
        ) {
            let mut branch_sets: BTreeMap<VertexId, BTreeSet<VertexId>> = BTreeMap::new();
            for (&p, &c) in &assignment {
                let set: BTreeSet<VertexId> = host_vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| comp_of[i] == c)
                    .map(|(_, &v)| v)
                    .collect();
                branch_sets.insert(p, set);
            }
            let mut edge_map: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
            for (&v, loops) in &p_loops {
                let supply = &h_loops[&assignment[&v]];
                for (i, &pe) in loops.iter().enumerate() {
                    edge_map.insert(pe, supply[i]);
                }
            }
            for (&(a, b), pes) in &p_pairs {
                let (ca, cb) = (assignment[&a], assignment[&b]);
                let supply = &h_pairs[&(ca.min(cb), ca.max(cb))];
                for (i, &pe) in pes.iter().enumerate() {
                    edge_map.insert(pe, supply[i]);
                }
            }
            let model = MinorModel {
                branch_sets,
                edge_map,
            };
            model.verify(host, pattern)?;
            return Ok(Some(model));
        }
    }
    Ok(None)
}

#[allow(clippy::too_many_arguments)]
fn assign(
    pattern_vertices: &[VertexId],
    at: usize,
    comps: &BTreeSet<usize>,
    p_loops: &BTreeMap<VertexId, Vec<EdgeId>>,
    p_pairs: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    p_degree: &BTreeMap<VertexId, usize>,
    h_loops: &BTreeMap<usize, Vec<EdgeId>>,
    h_pairs: &BTreeMap<(usize, usize), Vec<EdgeId>>,
    assignment: &mut BTreeMap<VertexId, usize>,
) -> bool {
    let Some(&v) = pattern_vertices.get(at) else {
        return true;
    };
    let need_loops = p_loops.get(&v).map_or(0, |l| l.len());
    'candidates: for &c in comps {
        if assignment.values().any(|&used| used == c) {
            continue;
        }
        if h_loops.get(&c).map_or(0, |l| l.len()) < need_loops {
            continue;
        }
        let degree_supply: usize = h_pairs
            .iter()
            .filter(|(&(x, y), _)| x == c || y == c)
            .map(|(_, es)| es.len())
            .sum();
        if degree_supply < p_degree[&v] {
            continue;
        }
        for (&(a, b), pes) in p_pairs {
            let other = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            let Some(&co) = assignment.get(&other) else {
                continue;
            };
            let have = h_pairs
                .get(&(c.min(co), c.max(co)))
                .map_or(0, |es| es.len());
            if have < pes.len() {
                continue 'candidates;
            }
        }
        assignment.insert(v, c);
        if assign(
            pattern_vertices,
            at + 1,
            comps,
            p_loops,
            p_pairs,
            p_degree,
            h_loops,
            h_pairs,
            assignment,
        ) {
            return true;
        }
        assignment.remove(&v);
    }
    false
}

/// One reduction step of a series-parallel reduction.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpStep {
    /// Deleted one edge of a parallel pair.
    Parallel { deleted: EdgeId, kept: EdgeId },
    /// Suppressed a 2-valent vertex, replacing its two edges by a fresh one.
    Series {
        vertex: VertexId,
        first: EdgeId,
        second: EdgeId,
        replacement: EdgeId,
    },
}

/// A complete reduction of a 2-connected loopless multigraph down to a
/// parallel pair, recorded step by step (the certificate that the graph is
/// series-parallel, and the scaffolding for ear decompositions).
#[derive(Clone, Debug)]
pub struct SpReduction {
    pub steps: Vec<SpStep>,
    /// The terminal parallel pair: its two vertices and two edges.
    pub terminals: (VertexId, VertexId),
    pub terminal_edges: (EdgeId, EdgeId),
}

/// Reduces by parallel deletions and series suppressions; `None` when the
/// graph is not series-parallel.  Expects a 2-connected loopless input with
/// at least two independent cycles' worth of edges.
pub fn sp_reduce(g: &WeightedGraph) -> Option<SpReduction> {
    let mut cur = g.clone();
    let mut steps = Vec::new();
    loop {
        if cur.n_vertices() == 2 && cur.n_edges() == 2 {
            let mut es = cur.edge_ids();
            let (e0, e1) = (es.next().unwrap(), es.next().unwrap());
            let (a, b) = cur.ends(e0);
            return Some(SpReduction {
                steps,
                terminals: (a.min(b), a.max(b)),
                terminal_edges: (e0, e1),
            });
        }
        if let Some((deleted, kept)) = find_parallel_pair(&cur) {
            let (next, _) = cur.delete_edge(deleted).ok()?;
            steps.push(SpStep::Parallel { deleted, kept });
            cur = next;
            continue;
        }
        if let Some((v, first, second)) = find_suppressible(&cur) {
            let replacement = cur.fresh_edge_id();
            cur = suppress(&cur, v, first, second, replacement)?;
            steps.push(SpStep::Series {
                vertex: v,
                first,
                second,
                replacement,
            });
            continue;
        }
        return None;
    }
}

pub fn is_series_parallel(g: &WeightedGraph) -> bool {
    g.blocks().iter().all(|b| match b {
        Block::WeightUnit { .. } => true,
        Block::TwoConnected { vertices, edges } => {
            if edges.len() <= 2 {
                return true;
            }
            let sub = match g.subgraph(vertices, edges) {
                Ok(s) => s,
                Err(_) => return false,
            };
            sp_reduce(&sub).is_some()
        }
    })
}

/// The first parallel pair in edge-id order, as (larger to delete, smaller
/// to keep).
fn find_parallel_pair(g: &WeightedGraph) -> Option<(EdgeId, EdgeId)> {
    let mut seen: BTreeMap<(VertexId, VertexId), EdgeId> = BTreeMap::new();
    for e in g.edge_ids() {
        let (a, b) = g.ends(e);
        let key = (a.min(b), a.max(b));
        if let Some(&kept) = seen.get(&key) {
            return Some((e, kept));
        }
        seen.insert(key, e);
    }
    None
}

/// A 2-valent vertex whose two edges lead to distinct neighbours.
fn find_suppressible(g: &WeightedGraph) -> Option<(VertexId, EdgeId, EdgeId)> {
    for v in g.vertex_ids() {
        if g.valence(v) != 2 {
            continue;
        }
        let inc = g.incident_edges(v);
        if inc.len() != 2 {
            continue;
        }
        let (e, f) = (inc[0], inc[1]);
        let (ea, eb) = g.ends(e);
        let (fa, fb) = g.ends(f);
        let u = if ea == v { eb } else { ea };
        let w = if fa == v { fb } else { fa };
        if u != w {
            return Some((v, e, f));
        }
    }
    None
}

fn suppress(
    g: &WeightedGraph,
    v: VertexId,
    first: EdgeId,
    second: EdgeId,
    replacement: EdgeId,
) -> Option<WeightedGraph> {
    let (ea, eb) = g.ends(first);
    let (fa, fb) = g.ends(second);
    let u = if ea == v { eb } else { ea };
    let w = if fa == v { fb } else { fa };
    let vertices: Vec<(VertexId, u32)> = g
        .vertex_ids()
        .filter(|&x| x != v)
        .map(|x| (x, g.weight(x)))
        .collect();
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = g
        .edge_ids()
        .filter(|&e| e != first && e != second)
        .map(|e| {
            let (a, b) = g.ends(e);
            (e, a, b)
        })
        .collect();
    edges.push((replacement, u, w));
    WeightedGraph::new(vertices, edges).ok()
}

/// Every connected graph reachable by one edge deletion or contraction, up
/// to isomorphism.
pub fn single_move_minors(g: &WeightedGraph) -> Vec<WeightedGraph> {
    let mut out: Vec<WeightedGraph> = Vec::new();
    for e in g.edge_ids() {
        if let Ok((h, _)) = g.delete_edge(e) {
            out.push(h);
        }
        if !g.is_loop(e) {
            if let Ok((h, _)) = g.contract_edge(e) {
                out.push(h);
            }
        }
    }
    dedup_graphs(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen;
    use crate::graph::rat;

    #[test]
    fn k4_contains_itself() {
        let k4 = fixtures::k4_unit();
        let m = find_minor_model(&k4, &k4).unwrap().expect("identity");
        m.verify(&k4, &k4).unwrap();
        assert!(m.branch_sets.values().all(|s| s.len() == 1));
    }

    #[test]
    fn forbidden_patterns_do_not_contain_each_other() {
        let k4 = fixtures::k4_unit();
        let l3 = fixtures::l3_unit();
        assert!(!has_minor(&k4, &l3).unwrap());
        assert!(!has_minor(&l3, &k4).unwrap());
    }

    #[test]
    fn prism_contains_both_patterns() {
        let prism = fixtures::prism_unit();
        let k4 = fixtures::k4_unit();
        let l3 = fixtures::l3_unit();
        let mk = find_minor_model(&prism, &k4).unwrap().expect("K4 in prism");
        mk.verify(&prism, &k4).unwrap();
        let ml = find_minor_model(&prism, &l3).unwrap().expect("L3 in prism");
        ml.verify(&prism, &l3).unwrap();
    }

    #[test]
    fn small_graphs_avoid_the_patterns() {
        let k4 = fixtures::k4_unit();
        let l3 = fixtures::l3_unit();
        for g in [
            fixtures::theta(rat(1), rat(1), rat(1)).graph().clone(),
            fixtures::b2_unit(),
            fixtures::dumbbell(rat(1), rat(1), rat(1)).graph().clone(),
            fixtures::fig1_full(rat(1), rat(1), rat(1), rat(1)).graph().clone(),
        ] {
            assert!(!has_minor(&g, &k4).unwrap());
            assert!(!has_minor(&g, &l3).unwrap());
        }
    }

    #[test]
    fn loopy_pattern_matches_loops() {
        let host = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let pattern = WeightedGraph::new(
            [(VertexId(0), 0)],
            [
                (EdgeId(0), VertexId(0), VertexId(0)),
                (EdgeId(1), VertexId(0), VertexId(0)),
            ],
        )
        .unwrap();
        let m = find_minor_model(host.graph(), &pattern)
            .unwrap()
            .expect("wedge of two loops");
        m.verify(host.graph(), &pattern).unwrap();
    }

    #[test]
    fn tampered_models_fail_verification() {
        let prism = fixtures::prism_unit();
        let k4 = fixtures::k4_unit();
        let m = find_minor_model(&prism, &k4).unwrap().unwrap();
        let mut bad = m.clone();
        let (&first_pe, _) = bad.edge_map.iter().next().unwrap();
        let used: BTreeSet<EdgeId> = bad.edge_map.values().copied().collect();
        if let Some(unused) = prism.edge_ids().find(|e| !used.contains(e)) {
            bad.edge_map.insert(first_pe, unused);
            assert!(bad.verify(&prism, &k4).is_err());
        }
        let mut bad2 = m.clone();
        bad2.branch_sets.iter_mut().next().unwrap().1.clear();
        assert!(bad2.verify(&prism, &k4).is_err());
    }

    #[test]
    fn sp_reduction_of_theta() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let red = sp_reduce(t.graph()).expect("theta is series-parallel");
        assert_eq!(red.steps.len(), 1);
        assert!(matches!(red.steps[0], SpStep::Parallel { .. }));
    }

    #[test]
    fn k4_is_not_series_parallel() {
        assert!(sp_reduce(&fixtures::k4_unit()).is_none());
        assert!(!is_series_parallel(&fixtures::k4_unit()));
    }

    #[test]
    fn sp_and_k4_minor_agree_on_random_biconnected_graphs() {
        let k4 = fixtures::k4_unit();
        for seed in 0..60 {
            let g = gen::random_biconnected_graph(seed, 5 + (seed as usize % 8));
            let sp = is_series_parallel(&g);
            let k4_free = !has_minor(&g, &k4).unwrap();
            assert_eq!(sp, k4_free, "seed {seed}");
        }
    }

    #[test]
    fn generated_sp_graphs_reduce() {
        for seed in 0..30 {
            let g = gen::random_sp_graph(seed, 3 + (seed as usize % 10));
            assert!(sp_reduce(&g).is_some(), "seed {seed}");
            assert!(!has_minor(&g, &fixtures::k4_unit()).unwrap(), "seed {seed}");
        }
    }

    #[test]
    fn single_moves_from_theta() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let minors = single_move_minors(t.graph());
        // Deleting any edge gives the 2-cycle; contracting any edge gives the
        // wedge of two loops.
        assert_eq!(minors.len(), 2);
    }
}
