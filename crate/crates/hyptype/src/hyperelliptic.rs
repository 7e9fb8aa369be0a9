//! Involutions, quotients, and the hyperelliptic test.
//!
//! A curve of genus at least two is hyperelliptic when its stable model
//! admits an isometric involution that fixes every positive-weight vertex and
//! whose quotient is a tree.  The quotient follows the metric convention that
//! an unflipped edge orbit keeps the length of its stabilizer times the edge
//! length (so pointwise-fixed edges double), while a flipped edge folds at
//! its midpoint into a pendant leg of half its length; the choice only
//! affects reported lengths, never the tree test.

use std::collections::{BTreeMap, BTreeSet};

use crate::connectivity::{c1_partition, separating_edges};
use crate::error::{Error, Result};
use crate::graph::{
    ratio, EdgeFate, EdgeId, EdgeTrace, End, HalfEdge, Rat, TropicalCurve, VertexId,
    WeightedGraph,
};

const MAX_VERTICES: usize = 12;
const MAX_EDGES: usize = 18;
const MAX_INVOLUTIONS: usize = 4096;

/// An order-two symmetry given on half-edges, so that loop reversals and
/// parallel-edge exchanges stay distinguishable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Involution {
    pub vertex_map: BTreeMap<VertexId, VertexId>,
    pub half_map: BTreeMap<HalfEdge, HalfEdge>,
}

impl Involution {
    pub fn identity(g: &WeightedGraph) -> Self {
        Involution {
            vertex_map: g.vertex_ids().map(|v| (v, v)).collect(),
            half_map: g
                .edge_ids()
                .flat_map(|e| {
                    [
                        (HalfEdge::new(e, End::A), HalfEdge::new(e, End::A)),
                        (HalfEdge::new(e, End::B), HalfEdge::new(e, End::B)),
                    ]
                })
                .collect(),
        }
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_map[&v]
    }

    pub fn half(&self, h: HalfEdge) -> HalfEdge {
        self.half_map[&h]
    }

    pub fn edge(&self, e: EdgeId) -> EdgeId {
        self.half_map[&HalfEdge::new(e, End::A)].edge
    }

    pub fn is_identity(&self) -> bool {
        self.vertex_map.iter().all(|(a, b)| a == b)
            && self.half_map.iter().all(|(a, b)| a == b)
    }

    /// The edge maps to itself with its two halves exchanged.
    pub fn is_flipped(&self, e: EdgeId) -> bool {
        let ha = HalfEdge::new(e, End::A);
        self.half_map[&ha] == ha.sibling()
    }

    /// The edge maps to itself with both halves fixed.
    pub fn is_pointwise_fixed(&self, e: EdgeId) -> bool {
        let ha = HalfEdge::new(e, End::A);
        self.half_map[&ha] == ha
    }

    pub fn fixed_vertices(&self) -> BTreeSet<VertexId> {
        self.vertex_map
            .iter()
            .filter(|(a, b)| a == b)
            .map(|(&a, _)| a)
            .collect()
    }

    pub fn flipped_edges(&self, g: &WeightedGraph) -> BTreeSet<EdgeId> {
        g.edge_ids().filter(|&e| self.is_flipped(e)).collect()
    }

    /// Structural validity on the bare graph: an order-two permutation pair
    /// respecting incidence, siblings, and weights.
    pub fn validate(&self, g: &WeightedGraph) -> Result<()> {
        let vs: BTreeSet<VertexId> = g.vertex_ids().collect();
        if self.vertex_map.keys().copied().collect::<BTreeSet<_>>() != vs
            || self.vertex_map.values().copied().collect::<BTreeSet<_>>() != vs
        {
            return Err(Error::InvalidInvolution(
                "vertex map is not a permutation of the vertex set".into(),
            ));
        }
        let hs: BTreeSet<HalfEdge> = g
            .edge_ids()
            .flat_map(|e| [HalfEdge::new(e, End::A), HalfEdge::new(e, End::B)])
            .collect();
        if self.half_map.keys().copied().collect::<BTreeSet<_>>() != hs
            || self.half_map.values().copied().collect::<BTreeSet<_>>() != hs
        {
            return Err(Error::InvalidInvolution(
                "half-edge map is not a permutation of the half-edges".into(),
            ));
        }
        for (&v, &w) in &self.vertex_map {
            if self.vertex_map[&w] != v {
                return Err(Error::InvalidInvolution(format!(
                    "vertex map is not an involution at {v}"
                )));
            }
            if g.weight(v) != g.weight(w) {
                return Err(Error::InvalidInvolution(format!(
                    "weights differ along the orbit of {v}"
                )));
            }
        }
        for (&h, &i) in &self.half_map {
            if self.half_map[&i] != h {
                return Err(Error::InvalidInvolution(format!(
                    "half-edge map is not an involution at {h:?}"
                )));
            }
            if self.half_map[&h.sibling()] != i.sibling() {
                return Err(Error::InvalidInvolution(format!(
                    "halves of {:?} map to different edges",
                    h.edge
                )));
            }
            if g.anchor(i) != self.vertex(g.anchor(h)) {
                return Err(Error::InvalidInvolution(format!(
                    "incidence broken at {h:?}"
                )));
            }
        }
        Ok(())
    }

    /// Full validity on a curve: structure plus preserved lengths.
    pub fn verify(&self, c: &TropicalCurve) -> Result<()> {
        self.validate(c.graph())?;
        for e in c.graph().edge_ids() {
            let f = self.edge(e);
            if c.length(e) != c.length(f) {
                return Err(Error::InvalidInvolution(format!(
                    "length changes along the orbit of {e}"
                )));
            }
        }
        Ok(())
    }
}

/// All isometric involutions of the curve, including the identity.
pub fn enumerate_involutions(c: &TropicalCurve) -> Result<Vec<Involution>> {
    let g = c.graph();
    if g.n_vertices() > MAX_VERTICES {
        return Err(Error::SizeGuard {
            what: "vertices for involution enumeration",
            limit: MAX_VERTICES,
            found: g.n_vertices(),
        });
    }
    if g.n_edges() > MAX_EDGES {
        return Err(Error::SizeGuard {
            what: "edges for involution enumeration",
            limit: MAX_EDGES,
            found: g.n_edges(),
        });
    }
    let vertices: Vec<VertexId> = g.vertex_ids().collect();
    let mut out: Vec<Involution> = Vec::new();
    let mut vmap: BTreeMap<VertexId, VertexId> = BTreeMap::new();
    enumerate_vertex_maps(c, &vertices, &mut vmap, &mut out)?;
    Ok(out)
}

fn vertex_signature(c: &TropicalCurve, v: VertexId) -> (u32, u32, Vec<Rat>, Vec<Rat>) {
    let g = c.graph();
    let mut loops: Vec<Rat> = Vec::new();
    let mut plain: Vec<Rat> = Vec::new();
    for e in g.incident_edges(v) {
        if g.is_loop(e) {
            loops.push(c.length(e).clone());
        } else {
            plain.push(c.length(e).clone());
        }
    }
    loops.sort();
    plain.sort();
    (g.weight(v), g.valence(v), loops, plain)
}

fn enumerate_vertex_maps(
    c: &TropicalCurve,
    vertices: &[VertexId],
    vmap: &mut BTreeMap<VertexId, VertexId>,
    out: &mut Vec<Involution>,
) -> Result<()> {
    let Some(&v) = vertices.iter().find(|v| !vmap.contains_key(v)) else {
        return extend_to_edges(c, vmap, out);
    };
    let sig_v = vertex_signature(c, v);
    // Fixed point.
    vmap.insert(v, v);
    enumerate_vertex_maps(c, vertices, vmap, out)?;
    vmap.remove(&v);
    // Paired with a later compatible vertex.
    let candidates: Vec<VertexId> = vertices
        .iter()
        .copied()
        .filter(|&w| w > v && !vmap.contains_key(&w))
        .collect();
    for w in candidates {
        if vertex_signature(c, w) != sig_v {
            continue;
        }
        vmap.insert(v, w);
        vmap.insert(w, v);
        enumerate_vertex_maps(c, vertices, vmap, out)?;
        vmap.remove(&v);
        vmap.remove(&w);
    }
    Ok(())
}

/// Unordered endpoint pair, the key grouping interchangeable edges.
fn pair_key(g: &WeightedGraph, e: EdgeId) -> (VertexId, VertexId) {
    let (a, b) = g.ends(e);
    (a.min(b), a.max(b))
}

fn extend_to_edges(
    c: &TropicalCurve,
    vmap: &BTreeMap<VertexId, VertexId>,
    out: &mut Vec<Involution>,
) -> Result<()> {
    let g = c.graph();
    let mut classes: BTreeMap<(VertexId, VertexId), Vec<EdgeId>> = BTreeMap::new();
    for e in g.edge_ids() {
        classes.entry(pair_key(g, e)).or_default().push(e);
    }
    // Each endpoint class must match its image class in length multiset.
    let image_key = |(a, b): (VertexId, VertexId)| -> (VertexId, VertexId) {
        let (x, y) = (vmap[&a], vmap[&b]);
        (x.min(y), x.max(y))
    };
    for (&key, edges) in &classes {
        let ik = image_key(key);
        let Some(image_edges) = classes.get(&ik) else {
            return Ok(());
        };
        let mut l1: Vec<&Rat> = edges.iter().map(|&e| c.length(e)).collect();
        let mut l2: Vec<&Rat> = image_edges.iter().map(|&e| c.length(e)).collect();
        l1.sort();
        l2.sort();
        if l1 != l2 {
            return Ok(());
        }
    }

    // Process one class orbit at a time; within a class kept by the image
    // map, choose an involutive matching, otherwise a bijection with the
    // partner class.
    let keys: Vec<(VertexId, VertexId)> = classes.keys().copied().collect();
    let mut half_map: BTreeMap<HalfEdge, HalfEdge> = BTreeMap::new();
    assemble_classes(c, vmap, &classes, &keys, 0, &mut half_map, out)
}

fn assemble_classes(
    c: &TropicalCurve,
    vmap: &BTreeMap<VertexId, VertexId>,
    classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    keys: &[(VertexId, VertexId)],
    at: usize,
    half_map: &mut BTreeMap<HalfEdge, HalfEdge>,
    out: &mut Vec<Involution>,
) -> Result<()> {
    let Some(&key) = keys.get(at) else {
        if out.len() >= MAX_INVOLUTIONS {
            return Err(Error::SizeGuard {
                what: "involutions",
                limit: MAX_INVOLUTIONS,
                found: out.len() + 1,
            });
        }
        out.push(Involution {
            vertex_map: vmap.clone(),
            half_map: half_map.clone(),
        });
        return Ok(());
    };
    let (a, b) = key;
    let (ia, ib) = (vmap[&a], vmap[&b]);
    let ikey = (ia.min(ib), ia.max(ib));
    if ikey < key {
        // Handled together with its partner.
        return assemble_classes(c, vmap, classes, keys, at + 1, half_map, out);
    }
    let edges = classes[&key].clone();
    if ikey > key {
        // Free bijection onto the partner class; the reverse is forced.
        let partner = classes[&ikey].clone();
        let mut used: BTreeSet<EdgeId> = BTreeSet::new();
        match_across(
            c, vmap, classes, keys, at, half_map, out, &edges, &partner, &mut used, 0, a,
        )
    } else {
        // Class maps to itself: involutive matching.
        let mut assigned: BTreeMap<EdgeId, EdgeId> = BTreeMap::new();
        match_within(
            c, vmap, classes, keys, at, half_map, out, &edges, &mut assigned, a, b,
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn match_across(
    c: &TropicalCurve,
    vmap: &BTreeMap<VertexId, VertexId>,
    classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    keys: &[(VertexId, VertexId)],
    at: usize,
    half_map: &mut BTreeMap<HalfEdge, HalfEdge>,
    out: &mut Vec<Involution>,
    edges: &[EdgeId],
    partner: &[EdgeId],
    used: &mut BTreeSet<EdgeId>,
    idx: usize,
    a: VertexId,
) -> Result<()> {
    let g = c.graph();
    if idx == edges.len() {
        return assemble_classes(c, vmap, classes, keys, at + 1, half_map, out);
    }
    let e = edges[idx];
    for &f in partner {
        if used.contains(&f) || c.length(e) != c.length(f) {
            continue;
        }
        // Orientation: the half of e at `a` goes to the half of f at the
        // image of `a`; for loops both orientations are legitimate.
        let orientations: Vec<(HalfEdge, HalfEdge)> = if g.is_loop(e) {
            vec![
                (HalfEdge::new(e, End::A), HalfEdge::new(f, End::A)),
                (HalfEdge::new(e, End::A), HalfEdge::new(f, End::B)),
            ]
        } else {
            let he = half_at(g, e, a);
            let hf = half_at(g, f, vmap[&a]);
            vec![(he, hf)]
        };
        used.insert(f);
        for (he, hf) in orientations {
            insert_pair(half_map, he, hf);
            match_across(
                c, vmap, classes, keys, at, half_map, out, edges, partner, used, idx + 1, a,
            )?;
            remove_pair(half_map, he, hf);
        }
        used.remove(&f);
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn match_within(
    c: &TropicalCurve,
    vmap: &BTreeMap<VertexId, VertexId>,
    classes: &BTreeMap<(VertexId, VertexId), Vec<EdgeId>>,
    keys: &[(VertexId, VertexId)],
    at: usize,
    half_map: &mut BTreeMap<HalfEdge, HalfEdge>,
    out: &mut Vec<Involution>,
    edges: &[EdgeId],
    assigned: &mut BTreeMap<EdgeId, EdgeId>,
    a: VertexId,
    b: VertexId,
) -> Result<()> {
    let g = c.graph();
    let Some(&e) = edges.iter().find(|e| !assigned.contains_key(e)) else {
        return assemble_classes(c, vmap, classes, keys, at + 1, half_map, out);
    };
    let is_loop = a == b;
    let swaps_ends = vmap[&a] == b && a != b;

    // e maps to itself.
    {
        let ha = HalfEdge::new(e, End::A);
        let choices: Vec<(HalfEdge, HalfEdge)> = if is_loop {
            if vmap[&a] == a {
                vec![(ha, ha), (ha, ha.sibling())]
            } else {
                vec![]
            }
        } else if swaps_ends {
            vec![(ha, ha.sibling())]
        } else if vmap[&a] == a && vmap[&b] == b {
            vec![(ha, ha)]
        } else {
            vec![]
        };
        assigned.insert(e, e);
        for (he, hf) in choices {
            insert_pair(half_map, he, hf);
            match_within(
                c, vmap, classes, keys, at, half_map, out, edges, assigned, a, b,
            )?;
            remove_pair(half_map, he, hf);
        }
        assigned.remove(&e);
    }

    // e swaps with a later unassigned edge of equal length.
    let later: Vec<EdgeId> = edges
        .iter()
        .copied()
        .filter(|&f| f > e && !assigned.contains_key(&f) && c.length(f) == c.length(e))
        .collect();
    for f in later {
        let orientations: Vec<(HalfEdge, HalfEdge)> = if is_loop {
            vec![
                (HalfEdge::new(e, End::A), HalfEdge::new(f, End::A)),
                (HalfEdge::new(e, End::A), HalfEdge::new(f, End::B)),
            ]
        } else {
            let he = half_at(g, e, a);
            let hf = half_at(g, f, vmap[&a]);
            vec![(he, hf)]
        };
        assigned.insert(e, f);
        assigned.insert(f, e);
        for (he, hf) in orientations {
            insert_pair(half_map, he, hf);
            match_within(
                c, vmap, classes, keys, at, half_map, out, edges, assigned, a, b,
            )?;
            remove_pair(half_map, he, hf);
        }
        assigned.remove(&e);
        assigned.remove(&f);
    }
    Ok(())
}

/// The half of a non-loop edge anchored at `v`.
fn half_at(g: &WeightedGraph, e: EdgeId, v: VertexId) -> HalfEdge {
    let (a, _) = g.ends(e);
    if a == v {
        HalfEdge::new(e, End::A)
    } else {
        HalfEdge::new(e, End::B)
    }
}

/// Records h <-> i together with the forced sibling pair.
fn insert_pair(half_map: &mut BTreeMap<HalfEdge, HalfEdge>, h: HalfEdge, i: HalfEdge) {
    half_map.insert(h, i);
    half_map.insert(i, h);
    half_map.insert(h.sibling(), i.sibling());
    half_map.insert(i.sibling(), h.sibling());
}

fn remove_pair(half_map: &mut BTreeMap<HalfEdge, HalfEdge>, h: HalfEdge, i: HalfEdge) {
    half_map.remove(&h);
    half_map.remove(&i);
    half_map.remove(&h.sibling());
    half_map.remove(&i.sibling());
}

/// The metric quotient of a curve by an involution.
pub fn quotient(c: &TropicalCurve, inv: &Involution) -> Result<(TropicalCurve, EdgeTrace)> {
    inv.verify(c)?;
    let g = c.graph();
    let vrep = |v: VertexId| -> VertexId { v.min(inv.vertex(v)) };

    let mut vertices: BTreeMap<VertexId, u32> = BTreeMap::new();
    for v in g.vertex_ids() {
        vertices.entry(vrep(v)).or_insert_with(|| g.weight(v));
    }
    let mut edges: Vec<(EdgeId, VertexId, VertexId)> = Vec::new();
    let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
    let mut edge_fate: BTreeMap<EdgeId, EdgeFate> = BTreeMap::new();
    let mut next_mid = g.fresh_vertex_id().0;
    let half = ratio(1, 2);
    for e in g.edge_ids() {
        let f = inv.edge(e);
        let (a, b) = g.ends(e);
        if f == e {
            if inv.is_flipped(e) {
                let m = VertexId(next_mid);
                next_mid += 1;
                vertices.insert(m, 0);
                edges.push((e, vrep(a), m));
                lengths.insert(e, c.length(e) * &half);
                edge_fate.insert(e, EdgeFate::Kept(e));
            } else {
                edges.push((e, a, b));
                lengths.insert(e, c.length(e) * ratio(2, 1));
                edge_fate.insert(e, EdgeFate::Kept(e));
            }
        } else {
            let rep = e.min(f);
            edge_fate.insert(e, EdgeFate::Kept(rep));
            if e == rep {
                edges.push((e, vrep(a), vrep(b)));
                lengths.insert(e, c.length(e).clone());
            }
        }
    }
    let graph = WeightedGraph::new(vertices, edges)?;
    let curve = TropicalCurve::new(graph, lengths)?;
    let trace = EdgeTrace {
        vertex_image: g.vertex_ids().map(|v| (v, vrep(v))).collect(),
        edge_fate,
    };
    Ok((curve, trace))
}

/// A positive hyperelliptic answer: the stable model, an involution on it,
/// and the witnessing tree quotient.
#[derive(Clone, Debug)]
pub struct HyperellipticWitness {
    pub stable: TropicalCurve,
    pub involution: Involution,
    pub quotient: TropicalCurve,
}

impl HyperellipticWitness {
    pub fn verify(&self) -> Result<()> {
        self.involution.verify(&self.stable)?;
        for v in self.stable.graph().vertex_ids() {
            if self.stable.graph().weight(v) > 0 && self.involution.vertex(v) != v {
                return Err(Error::Verification(format!(
                    "positive-weight vertex {v} is not fixed"
                )));
            }
        }
        let (q, _) = quotient(&self.stable, &self.involution)?;
        if !crate::iso::curves_isomorphic(&q, &self.quotient) {
            return Err(Error::Verification("stored quotient does not match".into()));
        }
        if q.graph().betti1() != 0 {
            return Err(Error::Verification("quotient is not a tree".into()));
        }
        Ok(())
    }
}

/// Decides whether the curve is hyperelliptic.  Applies to genus two or more;
/// the decision happens on the stable model.  Returns the canonical witness,
/// whose involution fixes every separating edge pointwise.
pub fn is_hyperelliptic(c: &TropicalCurve) -> Result<Option<HyperellipticWitness>> {
    let (stable, _) = c.stable_model()?;
    let g = stable.graph();
    let seps = separating_edges(g);
    let mut fallback: Option<HyperellipticWitness> = None;
    for inv in enumerate_involutions(&stable)? {
        if g.vertex_ids().any(|v| g.weight(v) > 0 && inv.vertex(v) != v) {
            continue;
        }
        let (q, _) = quotient(&stable, &inv)?;
        if q.graph().betti1() != 0 {
            continue;
        }
        let witness = HyperellipticWitness {
            stable: stable.clone(),
            involution: inv,
            quotient: q,
        };
        if seps.iter().all(|&e| witness.involution.is_pointwise_fixed(e)) {
            return Ok(Some(witness));
        }
        fallback.get_or_insert(witness);
    }
    Ok(fallback)
}

/// Redistributes each C1-set total equally over its edges, leaving separating
/// edges alone.  The result lives on the same graph and keeps the Jacobian;
/// when the graph shape admits a hyperelliptic metric at all, this choice of
/// lengths realizes one.
pub fn hyperelliptify_lengths(c: &TropicalCurve) -> TropicalCurve {
    let p = c1_partition(c.graph());
    let mut lengths = c.lengths().clone();
    for set in &p.sets {
        let total: Rat = set.iter().map(|e| c.length(*e)).sum();
        let share = total / crate::graph::rat(set.len() as i64);
        for &e in set {
            lengths.insert(e, share.clone());
        }
    }
    c.with_lengths(lengths).expect("same edge set")
}

/// A vertex fixed by the involution, creating one if necessary by splitting a
/// flipped edge at its midpoint (the involution extends across the split).
/// Returns the possibly subdivided curve, the extended involution, and the
/// fixed vertex.
pub fn fixed_attachment_point(
    c: &TropicalCurve,
    inv: &Involution,
) -> Result<(TropicalCurve, Involution, VertexId)> {
    inv.verify(c)?;
    if let Some(&v) = inv.fixed_vertices().iter().next() {
        return Ok((c.clone(), inv.clone(), v));
    }
    let Some(&e) = inv.flipped_edges(c.graph()).iter().next() else {
        return Err(Error::InvalidInvolution(
            "involution has neither fixed vertices nor flipped edges".into(),
        ));
    };
    let half_len = c.length(e) * ratio(1, 2);
    let (split, sub) = c.subdivide_edge(e, &half_len)?;
    // The two halves of the old edge swap; the midpoint is fixed.
    let (a, _) = c.graph().ends(e);
    let mut vertex_map = inv.vertex_map.clone();
    vertex_map.insert(sub.midpoint, sub.midpoint);
    let mut half_map = inv.half_map.clone();
    half_map.remove(&HalfEdge::new(e, End::A));
    half_map.remove(&HalfEdge::new(e, End::B));
    // sub.first runs a -> midpoint, sub.second runs midpoint -> b; the
    // involution sends the half at `a` to the half at `b`.
    let fa = half_at(split.graph(), sub.first, a);
    let sb = half_at(split.graph(), sub.second, inv.vertex(a));
    insert_pair(&mut half_map, fa, sb);
    let ext = Involution {
        vertex_map,
        half_map,
    };
    ext.verify(&split)?;
    Ok((split, ext, sub.midpoint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::gen;
    use crate::graph::rat;

    #[test]
    fn identity_is_valid() {
        let t = fixtures::theta(rat(1), rat(2), rat(3));
        let id = Involution::identity(t.graph());
        id.verify(&t).unwrap();
        assert!(id.is_identity());
    }

    #[test]
    fn theta_is_hyperelliptic_for_any_lengths() {
        let t = fixtures::theta(rat(1), rat(2), rat(7));
        let w = is_hyperelliptic(&t).unwrap().expect("theta");
        w.verify().unwrap();
        // All three edges flip, both vertices swap.
        assert_eq!(w.involution.fixed_vertices().len(), 0);
        assert_eq!(w.involution.flipped_edges(t.graph()).len(), 3);
        // Quotient: three pendant legs of half the lengths.
        assert_eq!(w.quotient.graph().n_edges(), 3);
        assert_eq!(w.quotient.total_length(), rat(5));
    }

    #[test]
    fn dumbbell_involution_fixes_bar_pointwise() {
        let d = fixtures::dumbbell(rat(2), rat(3), rat(2));
        let w = is_hyperelliptic(&d).unwrap().expect("dumbbell");
        w.verify().unwrap();
        let seps = separating_edges(d.graph());
        for &e in &seps {
            assert!(w.involution.is_pointwise_fixed(e));
        }
        // Bar doubles, loops fold: 2*3 + 1 + 1.
        assert_eq!(w.quotient.total_length(), rat(8));
    }

    #[test]
    fn k4_is_not_hyperelliptic() {
        let c = TropicalCurve::with_unit_lengths(fixtures::k4_unit());
        assert!(is_hyperelliptic(&c).unwrap().is_none());
    }

    #[test]
    fn l3_is_not_hyperelliptic() {
        let c = TropicalCurve::with_unit_lengths(fixtures::l3_unit());
        assert!(is_hyperelliptic(&c).unwrap().is_none());
    }

    #[test]
    fn unequal_theta_lengths_block_vertex_swaps_but_not_flips() {
        // Flips act edgewise, so arbitrary lengths never obstruct them.
        let t = fixtures::theta(rat(1), rat(1), rat(5));
        let invs = enumerate_involutions(&t).unwrap();
        assert!(invs.iter().any(|i| i.flipped_edges(t.graph()).len() == 3));
    }

    #[test]
    fn b2_shape_is_not_hyperelliptic_with_unit_lengths_made_unequal() {
        // The doubled-path shape only carries a hyperelliptic metric when the
        // two edges of each doubled pair agree in length.
        let g = fixtures::b2_unit();
        let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
        for (i, e) in g.edge_ids().enumerate() {
            lengths.insert(e, rat(1 + i as i64));
        }
        let c = TropicalCurve::new(g, lengths).unwrap();
        assert!(is_hyperelliptic(&c).unwrap().is_none());
    }

    #[test]
    fn averaging_cannot_fix_the_b2_shape() {
        let g = fixtures::b2_unit();
        let mut lengths: BTreeMap<EdgeId, Rat> = BTreeMap::new();
        for (i, e) in g.edge_ids().enumerate() {
            lengths.insert(e, rat(1 + i as i64));
        }
        let c = TropicalCurve::new(g, lengths).unwrap();
        let averaged = hyperelliptify_lengths(&c);
        let w = is_hyperelliptic(&averaged).unwrap();
        assert!(w.is_none(), "averaging cannot fix the B2 shape");
    }

    #[test]
    fn averaging_preserves_c1_totals() {
        for seed in 0..10 {
            let c = gen::random_stable_curve(seed + 200, 3, 9).unwrap();
            let avg = hyperelliptify_lengths(&c);
            let iso = crate::connectivity::c1_equivalent(&c, &avg)
                .unwrap()
                .expect("same Jacobian after averaging");
            let ca = crate::connectivity::three_edge_connectivization(&c).unwrap();
            let cb = crate::connectivity::three_edge_connectivization(&avg).unwrap();
            iso.verify_lengths(&ca.curve, &cb.curve).unwrap();
        }
    }

    #[test]
    fn genus_two_is_always_hyperelliptic() {
        for (i, g) in gen::enumerate_stable_graphs(2).into_iter().enumerate() {
            let mut rng = gen::rng_from_seed(i as u64);
            let c = gen::random_lengths(&mut rng, &g);
            let c = hyperelliptify_lengths(&c);
            let w = is_hyperelliptic(&c).unwrap();
            assert!(w.is_some(), "genus-2 graph {i} should be hyperelliptic");
            w.unwrap().verify().unwrap();
        }
    }

    #[test]
    fn quotient_of_cycle_is_a_path() {
        // A cycle with two equal arcs folds onto a path.
        let c = fixtures::cycle(&[rat(3), rat(3)]);
        let invs = enumerate_involutions(&c).unwrap();
        let tree_quotients: Vec<_> = invs
            .iter()
            .filter_map(|i| {
                let (q, _) = quotient(&c, i).ok()?;
                (q.graph().betti1() == 0).then_some(q)
            })
            .collect();
        assert!(!tree_quotients.is_empty());
    }

    #[test]
    fn attachment_point_splits_theta() {
        let t = fixtures::theta(rat(2), rat(2), rat(2));
        let w = is_hyperelliptic(&t).unwrap().unwrap();
        let (split, ext, v) = fixed_attachment_point(&w.stable, &w.involution).unwrap();
        assert_eq!(ext.vertex(v), v);
        assert_eq!(split.genus(), t.genus());
        assert_eq!(split.total_length(), t.total_length());
        ext.verify(&split).unwrap();
    }

    #[test]
    fn weighted_point_is_hyperelliptic() {
        let g = WeightedGraph::new([(VertexId(0), 2)], []).unwrap();
        let c = TropicalCurve::with_unit_lengths(g);
        let w = is_hyperelliptic(&c).unwrap().expect("weighted point");
        assert!(w.involution.is_identity());
    }
}
