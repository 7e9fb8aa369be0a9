//! Separating edges, C1-sets, and edge connectivizations.
//!
//! A C1-set collects nonseparating edges that are forced through the same
//! circuits: `e ~ f` when `e = f` or deleting both `e` and `f` disconnects
//! the graph.  C1-sets are exactly the series classes of the cycle matroid,
//! so contracting each one down to a single representative produces the
//! 3-edge connectivization, whose edges are in bijection with the C1-sets.
//! Jacobians only see C1-set length totals, which makes the connectivization
//! the right arena for Torelli-style comparisons.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{rat, EdgeId, EdgeTrace, Rat, TropicalCurve, VertexId, WeightedGraph};
use crate::matroid::{find_two_isomorphism, TwoIsomorphism};

/// Edges whose deletion disconnects the graph.  Loops never qualify.
pub fn separating_edges(g: &WeightedGraph) -> BTreeSet<EdgeId> {
    g.edge_ids()
        .filter(|&e| {
            !g.is_loop(e) && !g.connected_without_edges(&BTreeSet::from([e]))
        })
        .collect()
}

pub fn is_two_edge_connected(g: &WeightedGraph) -> bool {
    separating_edges(g).is_empty()
}

/// The partition of the nonseparating edges into C1-sets, plus the
/// separating edges left over.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C1Partition {
    pub sets: Vec<BTreeSet<EdgeId>>,
    pub separating: BTreeSet<EdgeId>,
}

impl C1Partition {
    pub fn set_of(&self, e: EdgeId) -> Option<usize> {
        self.sets.iter().position(|s| s.contains(&e))
    }

    /// Smallest edge id of the set, used as its surviving representative.
    pub fn representative(&self, index: usize) -> EdgeId {
        *self.sets[index].iter().next().unwrap()
    }

    /// Recheck the defining relation pair by pair: within a set every pair
    /// must separate, across sets no pair may.
    pub fn verify(&self, g: &WeightedGraph) -> Result<()> {
        let separating = separating_edges(g);
        if separating != self.separating {
            return Err(Error::Verification("separating edge set mismatch".into()));
        }
        let mut covered: BTreeSet<EdgeId> = BTreeSet::new();
        for s in &self.sets {
            for &e in s {
                if separating.contains(&e) || !covered.insert(e) {
                    return Err(Error::Verification(format!(
                        "edge {e} misplaced in the partition"
                    )));
                }
            }
        }
        let all: BTreeSet<EdgeId> = g.edge_ids().filter(|e| !separating.contains(e)).collect();
        if covered != all {
            return Err(Error::Verification("partition misses nonseparating edges".into()));
        }
        for (i, s) in self.sets.iter().enumerate() {
            for &e in s {
                for (j, t) in self.sets.iter().enumerate() {
                    for &f in t {
                        if e >= f {
                            continue;
                        }
                        let pair_separates =
                            !g.connected_without_edges(&BTreeSet::from([e, f]));
                        if pair_separates != (i == j) {
                            return Err(Error::Verification(format!(
                                "edges {e}, {f} contradict the C1 relation"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Computes the C1-sets by testing every pair of nonseparating edges for
/// being a separating pair, then merging with union-find.
pub fn c1_partition(g: &WeightedGraph) -> C1Partition {
    let separating = separating_edges(g);
    let edges: Vec<EdgeId> = g
        .edge_ids()
        .filter(|e| !separating.contains(e))
        .collect();
    let mut parent: Vec<usize> = (0..edges.len()).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for i in 0..edges.len() {
        for j in (i + 1)..edges.len() {
            if !g.connected_without_edges(&BTreeSet::from([edges[i], edges[j]])) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                parent[a.max(b)] = a.min(b);
            }
        }
    }
    let mut classes: BTreeMap<usize, BTreeSet<EdgeId>> = BTreeMap::new();
    for i in 0..edges.len() {
        let root = find(&mut parent, i);
        classes.entry(root).or_default().insert(edges[i]);
    }
    let mut sets: Vec<BTreeSet<EdgeId>> = classes.into_values().collect();
    sets.sort_by_key(|s| *s.iter().next().unwrap());
    C1Partition { sets, separating }
}

/// Contracts separating edges until none remain.
pub fn two_edge_connectivization(c: &TropicalCurve) -> Result<(TropicalCurve, EdgeTrace)> {
    let mut cur = c.clone();
    let mut trace = EdgeTrace::identity(c.graph());
    loop {
        let seps = separating_edges(cur.graph());
        let Some(&e) = seps.iter().next() else {
            return Ok((cur, trace));
        };
        let (next, step) = cur.contract_edge(e)?;
        trace = trace.then(&step);
        cur = next;
    }
}

/// A 3-edge connectivization: every C1-set contracted onto its smallest edge,
/// which then carries the set's total length.
#[derive(Clone, Debug)]
pub struct Connectivization {
    /// The connectivized curve; its edges are the C1-set representatives.
    pub curve: TropicalCurve,
    /// Vertex and edge fates from the input to `curve`.
    pub trace: EdgeTrace,
    /// The bridgeless intermediate stage.
    pub two_conn: TropicalCurve,
    /// C1-sets of the input's nonseparating edges.
    pub partition: C1Partition,
    /// Each nonseparating input edge to the representative of its set.
    pub psi: BTreeMap<EdgeId, EdgeId>,
}

pub fn three_edge_connectivization(c: &TropicalCurve) -> Result<Connectivization> {
    let (two_conn, trace2) = two_edge_connectivization(c)?;
    let partition = c1_partition(two_conn.graph());
    debug_assert!(partition.separating.is_empty());

    let mut graph = two_conn.graph().clone();
    let mut trace3 = EdgeTrace::identity(&graph);
    let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
    let mut psi: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
    for (i, set) in partition.sets.iter().enumerate() {
        let rep = partition.representative(i);
        let total: Rat = set.iter().map(|e| two_conn.length(*e)).sum();
        lengths.insert(rep, total);
        for &e in set {
            psi.insert(e, rep);
            if e != rep {
                let (next, step) = graph.contract_edge(e)?;
                trace3 = trace3.then(&step);
                graph = next;
            }
        }
    }
    let curve = TropicalCurve::new(graph, lengths)?;
    debug_assert!(c1_partition(curve.graph()).sets.iter().all(|s| s.len() == 1));
    Ok(Connectivization {
        curve,
        trace: trace2.then(&trace3),
        two_conn,
        partition,
        psi,
    })
}

/// Two curves are C1-equivalent when their 3-edge connectivizations admit a
/// length-preserving 2-isomorphism; by the tropical Torelli theorem this is
/// the same as having isomorphic Jacobians.  Returns the witnessing map
/// between the connectivizations, if any.
pub fn c1_equivalent(a: &TropicalCurve, b: &TropicalCurve) -> Result<Option<TwoIsomorphism>> {
    if a.genus() != b.genus() {
        return Ok(None);
    }
    let ca = three_edge_connectivization(a)?;
    let cb = three_edge_connectivization(b)?;
    crate::matroid::find_length_preserving_two_isomorphism(&ca.curve, &cb.curve)
}

/// Lifts a 2-isomorphism of connectivizations to a bijection of C1-set
/// indices.
pub fn induced_c1_bijection(
    ca: &Connectivization,
    cb: &Connectivization,
    iso: &TwoIsomorphism,
) -> Result<BTreeMap<usize, usize>> {
    let mut out = BTreeMap::new();
    for i in 0..ca.partition.sets.len() {
        let rep = ca.partition.representative(i);
        let f = iso
            .image(rep)
            .ok_or_else(|| Error::Verification(format!("edge {rep} missing from the map")))?;
        let j = cb
            .partition
            .set_of(f)
            .ok_or_else(|| Error::Verification(format!("edge {f} is not a representative")))?;
        out.insert(i, j);
    }
    if out.values().collect::<BTreeSet<_>>().len() != cb.partition.sets.len() {
        return Err(Error::Verification("C1-set bijection is not onto".into()));
    }
    Ok(out)
}

/// Carries the lengths of `source` onto the graph `target`, assuming their
/// 3-edge connectivizations are 2-isomorphic: each C1-set of `target` shares
/// its corresponding set's total equally, separating edges get length one.
/// The result has the same Jacobian as `source`.
pub fn transport_lengths(
    source: &TropicalCurve,
    target: &WeightedGraph,
) -> Result<TropicalCurve> {
    let cs = three_edge_connectivization(source)?;
    let unit = TropicalCurve::with_unit_lengths(target.clone());
    let ct = three_edge_connectivization(&unit)?;
    let iso = find_two_isomorphism(cs.curve.graph(), ct.curve.graph())?.ok_or_else(|| {
        Error::Verification("connectivizations are not 2-isomorphic".into())
    })?;
    let bij = induced_c1_bijection(&cs, &ct, &iso)?;

    let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
    for e in target.edge_ids() {
        lengths.insert(e, rat(1));
    }
    for (&i, &j) in &bij {
        let total: Rat = cs.partition.sets[i]
            .iter()
            .map(|e| cs.two_conn.length(*e))
            .sum();
        let tset = &ct.partition.sets[j];
        let share = total / rat(tset.len() as i64);
        for &f in tset {
            lengths.insert(f, share.clone());
        }
    }
    TropicalCurve::new(target.clone(), lengths)
}

/// Rebuilds the graph with one C1-set spliced back in a different cyclic
/// arrangement.  Deleting a C1-set `S` with `|S| = k >= 2` leaves exactly
/// `k` components which the edges of `S` join in a cycle; any reordering or
/// reversal produces a 2-isomorphic graph.  `order[i]` names the original
/// cyclic position whose component lands in position `i`, and `flips[i]`
/// swaps that component's two attachment ends.
pub fn apply_move_c_prime(
    g: &WeightedGraph,
    set: &BTreeSet<EdgeId>,
    order: &[usize],
    flips: &[bool],
) -> Result<WeightedGraph> {
    let k = set.len();
    if k <= 1 {
        return Ok(g.clone());
    }
    if order.len() != k || flips.len() != k {
        return Err(Error::InvalidMove(format!(
            "need a permutation and flags of length {k}"
        )));
    }
    let mut sorted_order = order.to_vec();
    sorted_order.sort_unstable();
    if sorted_order != (0..k).collect::<Vec<_>>() {
        return Err(Error::InvalidMove("order is not a permutation".into()));
    }

    // Components of g - S, as vertex sets.
    let mut comp_of: BTreeMap<VertexId, usize> = BTreeMap::new();
    let mut comps: Vec<BTreeSet<VertexId>> = Vec::new();
    for v in g.vertex_ids() {
        if comp_of.contains_key(&v) {
            continue;
        }
        let id = comps.len();
        let mut members = BTreeSet::from([v]);
        comp_of.insert(v, id);
        let mut stack = vec![v];
        while let Some(u) = stack.pop() {
            for e in g.incident_edges(u) {
                if set.contains(&e) {
                    continue;
                }
                let (a, b) = g.ends(e);
                let w = if a == u { b } else { a };
                if comp_of.insert(w, id).is_none() {
                    members.insert(w);
                    stack.push(w);
                }
            }
        }
        comps.push(members);
    }
    if comps.len() != k {
        return Err(Error::InvalidMove(format!(
            "deleting the set leaves {} components, expected {k}",
            comps.len()
        )));
    }

    // Walk the cycle of components; record each component's attachment pair.
    let s_edges: Vec<EdgeId> = set.iter().copied().collect();
    let mut incident: BTreeMap<usize, Vec<(EdgeId, VertexId)>> = BTreeMap::new();
    for &e in &s_edges {
        let (a, b) = g.ends(e);
        incident.entry(comp_of[&a]).or_default().push((e, a));
        incident.entry(comp_of[&b]).or_default().push((e, b));
    }
    for c in 0..k {
        if incident.get(&c).map_or(0, |v| v.len()) != 2 {
            return Err(Error::InvalidMove(format!(
                "component {c} is not attached by exactly two edges of the set"
            )));
        }
    }
    // Walk the component cycle from component 0, recording each position's
    // component, its (entry, exit) attachment pair, and the exit edge.
    let mut cycle: Vec<usize> = Vec::with_capacity(k);
    let mut walk_edges: Vec<EdgeId> = Vec::with_capacity(k);
    let mut attach: Vec<(VertexId, VertexId)> = vec![(VertexId(0), VertexId(0)); k];
    let mut cur = 0usize;
    let (mut cur_edge, mut entry_vertex) = incident[&cur][0];
    let first_edge = cur_edge;
    loop {
        let Some(&(exit_edge, exit_vertex)) =
            incident[&cur].iter().find(|&&(e, _)| e != cur_edge)
        else {
            return Err(Error::InvalidMove(
                "set edge has both ends in one component".into(),
            ));
        };
        cycle.push(cur);
        walk_edges.push(exit_edge);
        attach[cur] = (entry_vertex, exit_vertex);
        let (a, b) = g.ends(exit_edge);
        let (next_vertex, next_comp) = if comp_of[&a] == cur && comp_of[&b] != cur {
            (b, comp_of[&b])
        } else if comp_of[&b] == cur && comp_of[&a] != cur {
            (a, comp_of[&a])
        } else {
            return Err(Error::InvalidMove(
                "set edge does not join two distinct components".into(),
            ));
        };
        if next_comp == 0 {
            if exit_edge != first_edge {
                return Err(Error::InvalidMove("component cycle closed early".into()));
            }
            break;
        }
        cur = next_comp;
        cur_edge = exit_edge;
        entry_vertex = next_vertex;
    }
    if cycle.len() != k {
        return Err(Error::InvalidMove(
            "set edges do not arrange the components in a single cycle".into(),
        ));
    }

    // Reassemble: position i holds the component from original position
    // `order[i]`; the slot-i edge keeps its id and now joins the exit of
    // position i to the entry of position i + 1.  Identity order with no
    // flips rebuilds the graph unchanged.
    let vertices: Vec<(VertexId, u32)> = g.vertex_ids().map(|v| (v, g.weight(v))).collect();
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = g
        .edge_ids()
        .filter(|e| !set.contains(e))
        .map(|e| {
            let (a, b) = g.ends(e);
            (e, a, b)
        })
        .collect();
    let placed: Vec<(VertexId, VertexId)> = (0..k)
        .map(|i| {
            let comp = cycle[order[i]];
            let (en, ex) = attach[comp];
            if flips[i] {
                (ex, en)
            } else {
                (en, ex)
            }
        })
        .collect();
    for i in 0..k {
        let from = placed[i].1;
        let to = placed[(i + 1) % k].0;
        edges.push((walk_edges[i], from, to));
    }
    WeightedGraph::new(vertices, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen;
    use crate::graph::rat;
    use crate::iso::graphs_isomorphic;
    use crate::matroid::find_length_preserving_two_isomorphism;

    #[test]
    fn dumbbell_bar_is_separating() {
        let d = fixtures::dumbbell(rat(1), rat(2), rat(3));
        let seps = separating_edges(d.graph());
        assert_eq!(seps.len(), 1);
        assert!(!d.graph().is_loop(*seps.iter().next().unwrap()));
    }

    #[test]
    fn cycle_is_one_c1_set() {
        let c = fixtures::cycle(&[rat(1), rat(2), rat(3), rat(4)]);
        let p = c1_partition(c.graph());
        assert_eq!(p.sets.len(), 1);
        assert_eq!(p.sets[0].len(), 4);
        p.verify(c.graph()).unwrap();
    }

    #[test]
    fn theta_splits_into_singletons() {
        let t = fixtures::theta(rat(1), rat(2), rat(3));
        let p = c1_partition(t.graph());
        assert_eq!(p.sets.len(), 3);
        assert!(p.sets.iter().all(|s| s.len() == 1));
        p.verify(t.graph()).unwrap();
    }

    #[test]
    fn parallel_pair_with_loops_partition() {
        let c = fixtures::fig1_full(rat(1), rat(2), rat(3), rat(4));
        let p = c1_partition(c.graph());
        let mut sizes: Vec<usize> = p.sets.iter().map(|s| s.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 1, 2]);
        p.verify(c.graph()).unwrap();
    }

    #[test]
    fn connectivization_of_cycle_is_a_loop() {
        let c = fixtures::cycle(&[rat(1), rat(2), rat(3)]);
        let conn = three_edge_connectivization(&c).unwrap();
        let g3 = conn.curve.graph();
        assert_eq!(g3.n_edges(), 1);
        let e = g3.edge_ids().next().unwrap();
        assert!(g3.is_loop(e));
        assert_eq!(conn.curve.length(e), &rat(6));
    }

    #[test]
    fn connectivization_fixes_theta() {
        let t = fixtures::theta(rat(1), rat(2), rat(3));
        let conn = three_edge_connectivization(&t).unwrap();
        assert!(graphs_isomorphic(conn.curve.graph(), t.graph()));
        assert_eq!(conn.curve.total_length(), t.total_length());
    }

    #[test]
    fn torelli_pair_loops_example() {
        // Parallel pair plus a loop at each end, against a chain of three
        // loops: non-isomorphic curves with the same Jacobian.
        let a = fixtures::fig1_full(rat(1), rat(2), rat(4), rat(8));
        let g = crate::graph::WeightedGraph::new(
            [
                (VertexId(0), 0),
                (VertexId(1), 0),
                (VertexId(2), 0),
            ],
            [
                (EdgeId(0), VertexId(0), VertexId(0)),
                (EdgeId(1), VertexId(0), VertexId(1)),
                (EdgeId(2), VertexId(1), VertexId(1)),
                (EdgeId(3), VertexId(1), VertexId(2)),
                (EdgeId(4), VertexId(2), VertexId(2)),
            ],
        )
        .unwrap();
        let b = TropicalCurve::new(
            g,
            BTreeMap::from([
                (EdgeId(0), rat(3)),
                (EdgeId(1), rat(9)),
                (EdgeId(2), rat(4)),
                (EdgeId(3), rat(7)),
                (EdgeId(4), rat(8)),
            ]),
        )
        .unwrap();
        assert!(!crate::iso::curves_isomorphic(&a, &b));
        let iso = c1_equivalent(&a, &b).unwrap().expect("same Jacobian");
        let ca = three_edge_connectivization(&a).unwrap();
        let cb = three_edge_connectivization(&b).unwrap();
        iso.verify_lengths(&ca.curve, &cb.curve).unwrap();
    }

    #[test]
    fn connectivization_is_idempotent() {
        for seed in 0..10 {
            let c = gen::random_stable_curve(seed, 3, 9).unwrap();
            let once = three_edge_connectivization(&c).unwrap();
            let twice = three_edge_connectivization(&once.curve).unwrap();
            assert!(crate::iso::curves_isomorphic(&once.curve, &twice.curve));
        }
    }

    #[test]
    fn psi_covers_nonseparating_edges() {
        for seed in 0..10 {
            let c = gen::random_stable_curve(seed + 50, 3, 9).unwrap();
            let conn = three_edge_connectivization(&c).unwrap();
            let seps = separating_edges(c.graph());
            for e in c.graph().edge_ids() {
                assert_eq!(conn.psi.contains_key(&e), !seps.contains(&e));
            }
            for rep in conn.psi.values() {
                assert!(conn.curve.graph().has_edge(*rep));
            }
        }
    }

    #[test]
    fn move_c_prime_yields_two_isomorphic_graphs() {
        let (a, _) = fixtures::whitney_pair();
        let p = c1_partition(a.graph());
        let mut tried = 0;
        for s in &p.sets {
            if s.len() < 2 {
                continue;
            }
            let k = s.len();
            let order: Vec<usize> = (0..k).collect();
            let mut flips = vec![false; k];
            flips[0] = true;
            let moved = apply_move_c_prime(a.graph(), s, &order, &flips).unwrap();
            let iso = find_two_isomorphism(a.graph(), &moved).unwrap();
            assert!(iso.is_some(), "set {s:?}");
            iso.unwrap().verify(a.graph(), &moved).unwrap();
            tried += 1;
        }
        assert!(tried > 0);
    }

    #[test]
    fn transport_preserves_jacobian_data() {
        let (a, b) = fixtures::whitney_pair();
        let carried = transport_lengths(&a, b.graph()).unwrap();
        let ca = three_edge_connectivization(&a).unwrap();
        let cc = three_edge_connectivization(&carried).unwrap();
        let iso = find_length_preserving_two_isomorphism(&ca.curve, &cc.curve)
            .unwrap()
            .expect("transport keeps the Jacobian");
        iso.verify_lengths(&ca.curve, &cc.curve).unwrap();
    }

    #[test]
    fn random_partitions_verify() {
        for seed in 0..20 {
            let g = gen::random_biconnected_graph(seed, 7);
            c1_partition(&g).verify(&g).unwrap();
            let c = gen::random_stable_curve(seed, 2 + (seed % 3) as u32, 9).unwrap();
            c1_partition(c.graph()).verify(c.graph()).unwrap();
        }
    }
}
