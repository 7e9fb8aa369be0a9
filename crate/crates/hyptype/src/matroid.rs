//! Cycle matroids and 2-isomorphism of weighted graphs.
//!
//! The matroid of a weighted graph is the cycle matroid of the underlying
//! multigraph extended by one loop element per unit of vertex weight.  Two
//! weighted graphs are 2-isomorphic when their matroids agree under some edge
//! bijection; because the weight markers are interchangeable loops this comes
//! down to equal total weight plus a bijection of real edges carrying circuits
//! to circuits.  Circuits are found by enumerating the cycle space over GF(2)
//! and keeping the connected 2-regular members.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::graph::{EdgeId, Rat, TropicalCurve, VertexId, WeightedGraph};

const MAX_CYCLE_RANK: usize = 16;
const MAX_EDGES: usize = 128;

/// All circuits of the cycle matroid, sorted by size then edge ids.
///
/// Loop edges are singleton circuits; bridges appear in none.
pub fn circuits(g: &WeightedGraph) -> Result<Vec<BTreeSet<EdgeId>>> {
    let b1 = g.betti1() as usize;
    if b1 > MAX_CYCLE_RANK {
        return Err(Error::SizeGuard {
            what: "cycle rank for circuit enumeration",
            limit: MAX_CYCLE_RANK,
            found: b1,
        });
    }
    if g.n_edges() > MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "edges for circuit enumeration",
            limit: MAX_EDGES,
            found: g.n_edges(),
        });
    }
    let edges: Vec<EdgeId> = g.edge_ids().collect();
    let index: BTreeMap<EdgeId, usize> = edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();

    // Spanning tree by BFS from the smallest vertex.
    let root = g.vertex_ids().next().expect("nonempty graph");
    let mut parent_edge: BTreeMap<VertexId, EdgeId> = BTreeMap::new();
    let mut seen: BTreeSet<VertexId> = BTreeSet::new();
    seen.insert(root);
    let mut queue = std::collections::VecDeque::from([root]);
    let mut tree: BTreeSet<EdgeId> = BTreeSet::new();
    while let Some(v) = queue.pop_front() {
        for e in g.incident_edges(v) {
            if g.is_loop(e) {
                continue;
            }
            let (a, b) = g.ends(e);
            let other = if a == v { b } else { a };
            if seen.insert(other) {
                tree.insert(e);
                parent_edge.insert(other, e);
                queue.push_back(other);
            }
        }
    }

    let tree_path_to_root = |mut v: VertexId| -> u128 {
        let mut mask = 0u128;
        while let Some(&e) = parent_edge.get(&v) {
            mask ^= 1 << index[&e];
            let (a, b) = g.ends(e);
            v = if a == v { b } else { a };
        }
        mask
    };

    // Fundamental cycle of each non-tree edge, as an edge bitmask.
    let mut fundamental: Vec<u128> = Vec::new();
    for &e in &edges {
        if tree.contains(&e) {
            continue;
        }
        let (a, b) = g.ends(e);
        let mask = (1u128 << index[&e]) ^ tree_path_to_root(a) ^ tree_path_to_root(b);
        fundamental.push(mask);
    }
    debug_assert_eq!(fundamental.len(), b1);

    let mut found: BTreeSet<Vec<EdgeId>> = BTreeSet::new();
    for subset in 1u32..(1u32 << b1) {
        let mut mask = 0u128;
        for (i, f) in fundamental.iter().enumerate() {
            if subset >> i & 1 == 1 {
                mask ^= f;
            }
        }
        let member: Vec<EdgeId> = edges
            .iter()
            .enumerate()
            .filter(|&(i, _)| mask >> i & 1 == 1)
            .map(|(_, &e)| e)
            .collect();
        if is_circuit_set(g, &member) {
            found.insert(member);
        }
    }
    let mut out: Vec<BTreeSet<EdgeId>> = found
        .into_iter()
        .map(|v| v.into_iter().collect())
        .collect();
    out.sort_by_key(|c| (c.len(), c.iter().copied().collect::<Vec<_>>()));
    Ok(out)
}

/// A nonempty edge set is a circuit iff it is connected and every touched
/// vertex has degree exactly two within it (loops counting twice).
fn is_circuit_set(g: &WeightedGraph, member: &[EdgeId]) -> bool {
    if member.is_empty() {
        return false;
    }
    let mut degree: BTreeMap<VertexId, u32> = BTreeMap::new();
    for &e in member {
        let (a, b) = g.ends(e);
        *degree.entry(a).or_default() += 1;
        *degree.entry(b).or_default() += 1;
    }
    if degree.values().any(|&d| d != 2) {
        return false;
    }
    // Connectivity over the touched vertices.
    let mut adj: BTreeMap<VertexId, Vec<VertexId>> = BTreeMap::new();
    for &e in member {
        let (a, b) = g.ends(e);
        adj.entry(a).or_default().push(b);
        adj.entry(b).or_default().push(a);
    }
    let start = *degree.keys().next().unwrap();
    let mut seen = BTreeSet::from([start]);
    let mut stack = vec![start];
    while let Some(v) = stack.pop() {
        for &w in adj.get(&v).into_iter().flatten() {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == degree.len()
}

/// An edge bijection witnessing that two weighted graphs have the same
/// matroid.  `verify` re-derives the circuits on both sides and checks the
/// map carries one family exactly onto the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoIsomorphism {
    pub edge_map: BTreeMap<EdgeId, EdgeId>,
}

impl TwoIsomorphism {
    pub fn identity(g: &WeightedGraph) -> Self {
        TwoIsomorphism {
            edge_map: g.edge_ids().map(|e| (e, e)).collect(),
        }
    }

    pub fn inverse(&self) -> Self {
        TwoIsomorphism {
            edge_map: self.edge_map.iter().map(|(&a, &b)| (b, a)).collect(),
        }
    }

    pub fn image(&self, e: EdgeId) -> Option<EdgeId> {
        self.edge_map.get(&e).copied()
    }

    pub fn verify(&self, a: &WeightedGraph, b: &WeightedGraph) -> Result<()> {
        if a.total_weight() != b.total_weight() {
            return Err(Error::Verification(format!(
                "total weights differ: {} vs {}",
                a.total_weight(),
                b.total_weight()
            )));
        }
        let dom: BTreeSet<EdgeId> = self.edge_map.keys().copied().collect();
        let img: BTreeSet<EdgeId> = self.edge_map.values().copied().collect();
        if dom != a.edge_ids().collect::<BTreeSet<_>>() {
            return Err(Error::Verification("domain is not the full edge set".into()));
        }
        if img != b.edge_ids().collect::<BTreeSet<_>>() || img.len() != dom.len() {
            return Err(Error::Verification("map is not a bijection onto the edge set".into()));
        }
        let ca = circuits(a)?;
        let cb: BTreeSet<BTreeSet<EdgeId>> = circuits(b)?.into_iter().collect();
        if ca.len() != cb.len() {
            return Err(Error::Verification(format!(
                "circuit counts differ: {} vs {}",
                ca.len(),
                cb.len()
            )));
        }
        for c in &ca {
            let mapped: BTreeSet<EdgeId> = c.iter().map(|e| self.edge_map[e]).collect();
            if !cb.contains(&mapped) {
                return Err(Error::Verification(format!(
                    "circuit {c:?} maps to {mapped:?}, not a circuit"
                )));
            }
        }
        Ok(())
    }

    pub fn verify_lengths(&self, a: &TropicalCurve, b: &TropicalCurve) -> Result<()> {
        self.verify(a.graph(), b.graph())?;
        for (&e, &f) in &self.edge_map {
            if a.length(e) != b.length(f) {
                return Err(Error::Verification(format!(
                    "length of {e} is {} but its image {f} has {}",
                    a.length(e),
                    b.length(f)
                )));
            }
        }
        Ok(())
    }
}

/// 2-isomorphism search, ignoring lengths.
pub fn find_two_isomorphism(
    a: &WeightedGraph,
    b: &WeightedGraph,
) -> Result<Option<TwoIsomorphism>> {
    Ok(search(a, b, None, 1)?.into_iter().next())
}

/// 2-isomorphism search requiring every edge to map to an edge of equal
/// length.
pub fn find_length_preserving_two_isomorphism(
    a: &TropicalCurve,
    b: &TropicalCurve,
) -> Result<Option<TwoIsomorphism>> {
    Ok(search(a.graph(), b.graph(), Some((a.lengths(), b.lengths())), 1)?
        .into_iter()
        .next())
}

/// Every 2-isomorphism between the graphs, up to `limit` of them.
pub fn all_two_isomorphisms(
    a: &WeightedGraph,
    b: &WeightedGraph,
    limit: usize,
) -> Result<Vec<TwoIsomorphism>> {
    search(a, b, None, limit)
}

type Lengths<'a> = (&'a BTreeMap<EdgeId, Rat>, &'a BTreeMap<EdgeId, Rat>);

fn search(
    a: &WeightedGraph,
    b: &WeightedGraph,
    lengths: Option<Lengths>,
    limit: usize,
) -> Result<Vec<TwoIsomorphism>> {
    if a.total_weight() != b.total_weight() || a.n_edges() != b.n_edges() {
        return Ok(Vec::new());
    }
    let ca = circuits(a)?;
    let cb = circuits(b)?;
    if ca.len() != cb.len() {
        return Ok(Vec::new());
    }
    let mut sizes_a: Vec<usize> = ca.iter().map(|c| c.len()).collect();
    let mut sizes_b: Vec<usize> = cb.iter().map(|c| c.len()).collect();
    sizes_a.sort_unstable();
    sizes_b.sort_unstable();
    if sizes_a != sizes_b {
        return Ok(Vec::new());
    }

    let ea: Vec<EdgeId> = a.edge_ids().collect();
    let eb: Vec<EdgeId> = b.edge_ids().collect();
    let in_circuits = |cs: &[BTreeSet<EdgeId>], e: EdgeId| -> Vec<usize> {
        cs.iter()
            .enumerate()
            .filter(|(_, c)| c.contains(&e))
            .map(|(i, _)| i)
            .collect()
    };
    let sig = |cs: &[BTreeSet<EdgeId>],
               ls: Option<&BTreeMap<EdgeId, Rat>>,
               e: EdgeId|
     -> (Vec<usize>, Option<Rat>) {
        let mut sizes: Vec<usize> = cs.iter().filter(|c| c.contains(&e)).map(|c| c.len()).collect();
        sizes.sort_unstable();
        (sizes, ls.map(|m| m[&e].clone()))
    };
    let la = lengths.map(|(la, _)| la);
    let lb = lengths.map(|(_, lb)| lb);
    let sigs_b: BTreeMap<EdgeId, _> = eb.iter().map(|&f| (f, sig(&cb, lb, f))).collect();
    let mut candidates: BTreeMap<EdgeId, Vec<EdgeId>> = BTreeMap::new();
    for &e in &ea {
        let se = sig(&ca, la, e);
        let cand: Vec<EdgeId> = eb.iter().copied().filter(|f| sigs_b[f] == se).collect();
        if cand.is_empty() {
            return Ok(Vec::new());
        }
        candidates.insert(e, cand);
    }
    let mut order = ea.clone();
    order.sort_by_key(|e| (candidates[e].len(), e.0));

    let b_circuits_of: BTreeMap<EdgeId, BTreeSet<usize>> = eb
        .iter()
        .map(|&f| (f, in_circuits(&cb, f).into_iter().collect()))
        .collect();
    let a_circuits_of: BTreeMap<EdgeId, Vec<usize>> =
        ea.iter().map(|&e| (e, in_circuits(&ca, e))).collect();

    struct State<'s> {
        order: &'s [EdgeId],
        candidates: &'s BTreeMap<EdgeId, Vec<EdgeId>>,
        a_circuits_of: &'s BTreeMap<EdgeId, Vec<usize>>,
        b_circuits_of: &'s BTreeMap<EdgeId, BTreeSet<usize>>,
        map: BTreeMap<EdgeId, EdgeId>,
        used: BTreeSet<EdgeId>,
        // For each circuit of `a`, the set of circuits of `b` still compatible
        // with the partial map.
        compat: Vec<BTreeSet<usize>>,
        out: Vec<TwoIsomorphism>,
        limit: usize,
    }

    impl State<'_> {
        fn go(&mut self, depth: usize) {
            if self.out.len() >= self.limit {
                return;
            }
            let Some(&e) = self.order.get(depth) else {
                self.out.push(TwoIsomorphism {
                    edge_map: self.map.clone(),
                });
                return;
            };
            for i in 0..self.candidates[&e].len() {
                let f = self.candidates[&e][i];
                if self.used.contains(&f) {
                    continue;
                }
                // Narrow the compatible-circuit sets and remember the trail.
                let mut trail: Vec<(usize, BTreeSet<usize>)> = Vec::new();
                let mut ok = true;
                for &ci in &self.a_circuits_of[&e] {
                    let narrowed: BTreeSet<usize> = self.compat[ci]
                        .intersection(&self.b_circuits_of[&f])
                        .copied()
                        .collect();
                    if narrowed.is_empty() {
                        ok = false;
                        break;
                    }
                    trail.push((ci, std::mem::replace(&mut self.compat[ci], narrowed)));
                }
                if ok {
                    self.map.insert(e, f);
                    self.used.insert(f);
                    self.go(depth + 1);
                    self.map.remove(&e);
                    self.used.remove(&f);
                }
                for (ci, old) in trail.into_iter().rev() {
                    self.compat[ci] = old;
                }
                if self.out.len() >= self.limit {
                    return;
                }
            }
        }
    }

    // Seed compatibility: circuits can only match circuits of equal size.
    let compat: Vec<BTreeSet<usize>> = ca
        .iter()
        .map(|c| {
            cb.iter()
                .enumerate()
                .filter(|(_, d)| d.len() == c.len())
                .map(|(i, _)| i)
                .collect()
        })
        .collect();
    let mut state = State {
        order: &order,
        candidates: &candidates,
        a_circuits_of: &a_circuits_of,
        b_circuits_of: &b_circuits_of,
        map: BTreeMap::new(),
        used: BTreeSet::new(),
        compat,
        out: Vec::new(),
        limit: limit.max(1),
    };
    state.go(0);
    let out = state.out;
    for iso in &out {
        debug_assert!(iso.verify(a, b).is_ok());
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen;
    use crate::graph::rat;
    use crate::iso::curves_isomorphic;

    #[test]
    fn theta_has_three_two_edge_circuits() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let cs = circuits(t.graph()).unwrap();
        assert_eq!(cs.len(), 3);
        assert!(cs.iter().all(|c| c.len() == 2));
    }

    #[test]
    fn k4_has_seven_circuits() {
        let cs = circuits(&fixtures::k4_unit()).unwrap();
        let mut sizes: Vec<usize> = cs.iter().map(|c| c.len()).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![3, 3, 3, 3, 4, 4, 4]);
    }

    #[test]
    fn dumbbell_circuits_are_its_loops() {
        let d = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let cs = circuits(d.graph()).unwrap();
        assert_eq!(cs.len(), 2);
        assert!(cs.iter().all(|c| c.len() == 1));
    }

    #[test]
    fn theta_and_dumbbell_are_not_two_isomorphic() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let d = fixtures::dumbbell(rat(1), rat(1), rat(1));
        assert_eq!(t.genus(), d.genus());
        assert!(find_two_isomorphism(t.graph(), d.graph()).unwrap().is_none());
    }

    #[test]
    fn whitney_pair_is_two_isomorphic_but_not_isomorphic() {
        let (a, b) = fixtures::whitney_pair();
        assert!(!curves_isomorphic(&a, &b));
        let iso = find_length_preserving_two_isomorphism(&a, &b)
            .unwrap()
            .expect("whitney twist");
        iso.verify_lengths(&a, &b).unwrap();
    }

    #[test]
    fn identity_verifies() {
        let g = fixtures::k4_unit();
        TwoIsomorphism::identity(&g).verify(&g, &g).unwrap();
    }

    #[test]
    fn weight_totals_must_agree() {
        let t = fixtures::theta(rat(1), rat(1), rat(1));
        let v = t.graph().vertex_ids().next().unwrap();
        let heavier = t.graph().set_weight(v, 1).unwrap();
        assert!(find_two_isomorphism(t.graph(), &heavier).unwrap().is_none());
    }

    /// Exhaustive permutation oracle for small graphs.
    fn brute_force_exists(a: &WeightedGraph, b: &WeightedGraph) -> bool {
        let ea: Vec<EdgeId> = a.edge_ids().collect();
        let mut eb: Vec<EdgeId> = b.edge_ids().collect();
        if ea.len() != eb.len() {
            return false;
        }
        fn permute(
            ea: &[EdgeId],
            eb: &mut Vec<EdgeId>,
            k: usize,
            test: &mut impl FnMut(&BTreeMap<EdgeId, EdgeId>) -> bool,
        ) -> bool {
            if k == eb.len() {
                let map: BTreeMap<EdgeId, EdgeId> =
                    ea.iter().copied().zip(eb.iter().copied()).collect();
                return test(&map);
            }
            for i in k..eb.len() {
                eb.swap(k, i);
                if permute(ea, eb, k + 1, test) {
                    eb.swap(k, i);
                    return true;
                }
                eb.swap(k, i);
            }
            false
        }
        permute(&ea, &mut eb, 0, &mut |map| {
            TwoIsomorphism { edge_map: map.clone() }.verify(a, b).is_ok()
        })
    }

    #[test]
    fn search_agrees_with_brute_force() {
        for seed in 0..40u64 {
            let g = gen::random_biconnected_graph(seed, 4 + (seed as usize % 3));
            let h = gen::random_biconnected_graph(seed + 1000, 4 + ((seed + 1) as usize % 3));
            for (x, y) in [(&g, &g), (&g, &h)] {
                if x.n_edges() > 7 || y.n_edges() > 7 {
                    continue;
                }
                let fast = find_two_isomorphism(x, y).unwrap().is_some();
                assert_eq!(fast, brute_force_exists(x, y), "seed {seed}");
            }
        }
    }

    #[test]
    fn length_constraints_restrict_matches() {
        let a = fixtures::theta(rat(1), rat(2), rat(3));
        let b = fixtures::theta(rat(3), rat(1), rat(2));
        let c = fixtures::theta(rat(1), rat(1), rat(3));
        assert!(find_length_preserving_two_isomorphism(&a, &b).unwrap().is_some());
        assert!(find_length_preserving_two_isomorphism(&a, &c).unwrap().is_none());
    }
}
