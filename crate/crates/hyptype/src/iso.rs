//! Isomorphism testing for weighted multigraphs and tropical curves.
//!
//! Backtracking on vertices with signature pruning; adequate for the small
//! instances this crate works with.  Curve isomorphism additionally requires
//! the multiset of edge lengths between every matched vertex pair to agree.

use std::collections::BTreeMap;

use crate::graph::{Rat, TropicalCurve, VertexId, WeightedGraph};

/// Label attached to edges during matching; `None` ignores lengths.
type PairKey = (VertexId, VertexId);

fn pair_key(a: VertexId, b: VertexId) -> PairKey {
    (a.min(b), a.max(b))
}

/// Multiset of edge labels between each unordered vertex pair.
fn pair_counts<L: Ord + Clone>(
    g: &WeightedGraph,
    label: impl Fn(crate::graph::EdgeId) -> L,
) -> BTreeMap<PairKey, BTreeMap<L, u32>> {
    let mut out: BTreeMap<PairKey, BTreeMap<L, u32>> = BTreeMap::new();
    for e in g.edge_ids() {
        let (a, b) = g.ends(e);
        *out.entry(pair_key(a, b))
            .or_default()
            .entry(label(e))
            .or_insert(0) += 1;
    }
    out
}

fn vertex_sig<L: Ord + Clone>(
    g: &WeightedGraph,
    counts: &BTreeMap<PairKey, BTreeMap<L, u32>>,
    v: VertexId,
) -> (u32, u32, Vec<(L, u32)>) {
    let mut incident: BTreeMap<L, u32> = BTreeMap::new();
    for (&(a, b), labels) in counts {
        if a == v || b == v {
            for (l, c) in labels {
                let mult = if a == b { 2 * c } else { *c };
                *incident.entry(l.clone()).or_insert(0) += mult;
            }
        }
    }
    (
        g.weight(v),
        g.valence(v),
        incident.into_iter().collect(),
    )
}

fn find_isomorphism_labeled<L: Ord + Clone>(
    a: &WeightedGraph,
    b: &WeightedGraph,
    label_a: impl Fn(crate::graph::EdgeId) -> L,
    label_b: impl Fn(crate::graph::EdgeId) -> L,
) -> Option<BTreeMap<VertexId, VertexId>> {
    if a.n_vertices() != b.n_vertices() || a.n_edges() != b.n_edges() {
        return None;
    }
    let ca = pair_counts(a, label_a);
    let cb = pair_counts(b, label_b);
    let sig_a: BTreeMap<VertexId, _> =
        a.vertex_ids().map(|v| (v, vertex_sig(a, &ca, v))).collect();
    let sig_b: BTreeMap<VertexId, _> =
        b.vertex_ids().map(|v| (v, vertex_sig(b, &cb, v))).collect();
    {
        let mut ma: Vec<_> = sig_a.values().collect();
        let mut mb: Vec<_> = sig_b.values().collect();
        ma.sort();
        mb.sort();
        if ma != mb {
            return None;
        }
    }

    // Most-constrained-first: rarest signatures early.
    let mut order: Vec<VertexId> = a.vertex_ids().collect();
    let mut sig_freq: BTreeMap<&_, u32> = BTreeMap::new();
    for s in sig_a.values() {
        *sig_freq.entry(s).or_insert(0) += 1;
    }
    order.sort_by_key(|v| (sig_freq[&sig_a[v]], *v));

    let bs: Vec<VertexId> = b.vertex_ids().collect();
    let mut map: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    let mut used: BTreeMap<VertexId, bool> = bs.iter().map(|&v| (v, false)).collect();

    fn empty<L: Ord>() -> BTreeMap<L, u32> {
        BTreeMap::new()
    }

    fn go<L: Ord + Clone>(
        order: &[VertexId],
        depth: usize,
        bs: &[VertexId],
        ca: &BTreeMap<PairKey, BTreeMap<L, u32>>,
        cb: &BTreeMap<PairKey, BTreeMap<L, u32>>,
        sig_a: &BTreeMap<VertexId, (u32, u32, Vec<(L, u32)>)>,
        sig_b: &BTreeMap<VertexId, (u32, u32, Vec<(L, u32)>)>,
        map: &mut BTreeMap<VertexId, VertexId>,
        used: &mut BTreeMap<VertexId, bool>,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let u = order[depth];
        for &x in bs {
            if used[&x] || sig_a[&u] != sig_b[&x] {
                continue;
            }
            // Loops at u must match loops at x; edges to assigned vertices
            // must match labels and multiplicities.
            let ok = {
                let loops_ok = ca.get(&(u, u)).unwrap_or(&empty())
                    == cb.get(&(x, x)).unwrap_or(&empty());
                loops_ok
                    && map.iter().all(|(&v2, &y2)| {
                        ca.get(&pair_key(u, v2)).unwrap_or(&empty())
                            == cb.get(&pair_key(x, y2)).unwrap_or(&empty())
                    })
            };
            if !ok {
                continue;
            }
            map.insert(u, x);
            *used.get_mut(&x).unwrap() = true;
            if go(order, depth + 1, bs, ca, cb, sig_a, sig_b, map, used) {
                return true;
            }
            map.remove(&u);
            *used.get_mut(&x).unwrap() = false;
        }
        false
    }

    if go(
        &order, 0, &bs, &ca, &cb, &sig_a, &sig_b, &mut map, &mut used,
    ) {
        Some(map)
    } else {
        None
    }
}

/// Vertex bijection preserving weights and edge multiplicities, if any.
pub fn find_graph_isomorphism(
    a: &WeightedGraph,
    b: &WeightedGraph,
) -> Option<BTreeMap<VertexId, VertexId>> {
    find_isomorphism_labeled(a, b, |_| (), |_| ())
}

pub fn graphs_isomorphic(a: &WeightedGraph, b: &WeightedGraph) -> bool {
    find_graph_isomorphism(a, b).is_some()
}

/// Isomorphism preserving weights and edge lengths.
pub fn curves_isomorphic(a: &TropicalCurve, b: &TropicalCurve) -> bool {
    find_isomorphism_labeled(
        a.graph(),
        b.graph(),
        |e| a.length(e).clone(),
        |e| b.length(e).clone(),
    )
    .is_some()
}

/// Cheap isomorphism-invariant key for bucketing graphs before the full test.
pub fn invariant_key(g: &WeightedGraph) -> (usize, usize, u32, Vec<(u32, u32)>, Vec<u32>) {
    let mut sigs: Vec<(u32, u32)> = g
        .vertex_ids()
        .map(|v| (g.weight(v), g.valence(v)))
        .collect();
    sigs.sort();
    let counts = pair_counts(g, |_| ());
    let mut mults: Vec<u32> = counts.values().map(|m| m[&()]).collect();
    mults.sort();
    (g.n_vertices(), g.n_edges(), g.total_weight(), sigs, mults)
}

/// Deduplicates a list of graphs up to isomorphism, preserving first-seen
/// order.
pub fn dedup_graphs(graphs: Vec<WeightedGraph>) -> Vec<WeightedGraph> {
    let mut buckets: BTreeMap<_, Vec<usize>> = BTreeMap::new();
    let mut out: Vec<WeightedGraph> = Vec::new();
    for g in graphs {
        let key = invariant_key(&g);
        let bucket = buckets.entry(key).or_default();
        if !bucket.iter().any(|&i| graphs_isomorphic(&out[i], &g)) {
            bucket.push(out.len());
            out.push(g);
        }
    }
    out
}

/// Returns true when `lengths_a` between matched pairs agree; used by tests.
pub fn find_curve_isomorphism(
    a: &TropicalCurve,
    b: &TropicalCurve,
) -> Option<BTreeMap<VertexId, VertexId>> {
    let la: BTreeMap<_, Rat> = a.lengths().clone();
    let lb: BTreeMap<_, Rat> = b.lengths().clone();
    find_isomorphism_labeled(a.graph(), b.graph(), |e| la[&e].clone(), |e| lb[&e].clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::{rat, EdgeId, VertexId, WeightedGraph};

    #[test]
    fn relabeled_graphs_are_isomorphic() {
        let a = fixtures::k4_unit();
        // Same K4 with scrambled ids.
        let b = WeightedGraph::new(
            [
                (VertexId(10), 0),
                (VertexId(20), 0),
                (VertexId(30), 0),
                (VertexId(40), 0),
            ],
            [
                (EdgeId(1), VertexId(10), VertexId(20)),
                (EdgeId(2), VertexId(10), VertexId(30)),
                (EdgeId(3), VertexId(10), VertexId(40)),
                (EdgeId(4), VertexId(20), VertexId(30)),
                (EdgeId(5), VertexId(20), VertexId(40)),
                (EdgeId(6), VertexId(30), VertexId(40)),
            ],
        )
        .unwrap();
        assert!(graphs_isomorphic(&a, &b));
    }

    #[test]
    fn multiplicities_matter() {
        let b2 = fixtures::b2_unit();
        // Same counts but the parallel classes arranged differently: here the
        // single edge sits between the two doubled pairs' common vertex.
        let other = WeightedGraph::new(
            [(VertexId(0), 0), (VertexId(1), 0), (VertexId(2), 0)],
            [
                (EdgeId(0), VertexId(0), VertexId(1)),
                (EdgeId(1), VertexId(0), VertexId(1)),
                (EdgeId(2), VertexId(0), VertexId(2)),
                (EdgeId(3), VertexId(0), VertexId(2)),
                (EdgeId(4), VertexId(0), VertexId(0)),
            ],
        )
        .unwrap();
        assert!(!graphs_isomorphic(&b2, &other));
    }

    #[test]
    fn weights_matter() {
        let a = WeightedGraph::new(
            [(VertexId(0), 1), (VertexId(1), 0)],
            [(EdgeId(0), VertexId(0), VertexId(1))],
        )
        .unwrap();
        let b = WeightedGraph::new(
            [(VertexId(0), 0), (VertexId(1), 1)],
            [(EdgeId(0), VertexId(0), VertexId(1))],
        )
        .unwrap();
        assert!(graphs_isomorphic(&a, &b));
        let c = WeightedGraph::new(
            [(VertexId(0), 1), (VertexId(1), 1)],
            [(EdgeId(0), VertexId(0), VertexId(1))],
        )
        .unwrap();
        assert!(!graphs_isomorphic(&a, &c));
    }

    #[test]
    fn lengths_matter_for_curves() {
        let a = fixtures::theta(rat(1), rat(2), rat(3));
        let b = fixtures::theta(rat(3), rat(1), rat(2));
        let c = fixtures::theta(rat(1), rat(2), rat(4));
        assert!(curves_isomorphic(&a, &b));
        assert!(!curves_isomorphic(&a, &c));
    }

    #[test]
    fn whitney_pair_not_isomorphic() {
        let (a, b) = fixtures::whitney_pair();
        assert!(graphs_isomorphic(a.graph(), b.graph()));
        assert!(!curves_isomorphic(&a, &b));
    }

    #[test]
    fn dedup_collapses_relabelings() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let graphs = vec![
            t.graph().clone(),
            t.graph().clone(),
            fixtures::k4_unit(),
        ];
        assert_eq!(dedup_graphs(graphs).len(), 2);
    }
}
