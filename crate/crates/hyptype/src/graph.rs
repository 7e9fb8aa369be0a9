//! Weighted multigraphs with half-edge structure, and their metric versions.
//!
//! A [`WeightedGraph`] is a connected multigraph with nonnegative integer
//! vertex weights; loops and parallel edges are allowed.  Every edge carries
//! two half-edges anchored at its endpoints, so symmetries can act on edge
//! orientations (a loop may map to itself with its half-edges exchanged).
//! A [`TropicalCurve`] additionally assigns a positive rational length to
//! each edge.  All arithmetic on lengths is exact.
//!
//! Rewriting operations (contraction, deletion, suppression, subdivision)
//! return a fresh graph together with an [`EdgeTrace`] recording where every
//! vertex and edge of the source ended up; identifiers of surviving objects
//! are preserved so traces compose.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;

use crate::error::{Error, Result};

/// Exact edge length.
pub type Rat = BigRational;

/// Convenience constructor for an integer length.
pub fn rat(n: i64) -> Rat {
    Rat::from_integer(n.into())
}

/// Convenience constructor for the fraction `n/d`.
pub fn ratio(n: i64, d: i64) -> Rat {
    Rat::new(n.into(), d.into())
}

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VertexId(pub u32);

#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(pub u32);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Debug for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

impl fmt::Debug for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "e{}", self.0)
    }
}

/// Which half of an edge.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub enum End {
    A,
    B,
}

impl End {
    pub fn other(self) -> End {
        match self {
            End::A => End::B,
            End::B => End::A,
        }
    }
}

/// One half of an edge, anchored at a vertex.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct HalfEdge {
    pub edge: EdgeId,
    pub end: End,
}

impl HalfEdge {
    pub fn new(edge: EdgeId, end: End) -> Self {
        HalfEdge { edge, end }
    }

    /// The other half of the same edge.
    pub fn sibling(self) -> Self {
        HalfEdge::new(self.edge, self.end.other())
    }
}

/// Where an edge of the source graph ended up after a rewriting operation.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum EdgeFate {
    /// Survives as (or was merged into) this target edge.
    Kept(EdgeId),
    /// Contracted or retracted onto this target vertex.
    Collapsed(VertexId),
    /// Removed outright.
    Deleted,
}

/// Maps vertices and edges of a source graph to their images in a target.
#[derive(Clone, PartialEq, Eq, Debug, Default)]
pub struct EdgeTrace {
    pub vertex_image: BTreeMap<VertexId, VertexId>,
    pub edge_fate: BTreeMap<EdgeId, EdgeFate>,
}

impl EdgeTrace {
    pub fn identity(g: &WeightedGraph) -> Self {
        EdgeTrace {
            vertex_image: g.vertex_ids().map(|v| (v, v)).collect(),
            edge_fate: g.edge_ids().map(|e| (e, EdgeFate::Kept(e))).collect(),
        }
    }

    /// Composition: first `self`, then `next`.
    pub fn then(&self, next: &EdgeTrace) -> EdgeTrace {
        let vertex_image = self
            .vertex_image
            .iter()
            .map(|(&v, &w)| (v, next.vertex_image[&w]))
            .collect();
        let edge_fate = self
            .edge_fate
            .iter()
            .map(|(&e, &fate)| {
                let fate = match fate {
                    EdgeFate::Kept(f) => next.edge_fate[&f],
                    EdgeFate::Collapsed(v) => EdgeFate::Collapsed(next.vertex_image[&v]),
                    EdgeFate::Deleted => EdgeFate::Deleted,
                };
                (e, fate)
            })
            .collect();
        EdgeTrace {
            vertex_image,
            edge_fate,
        }
    }

    pub fn vertex(&self, v: VertexId) -> VertexId {
        self.vertex_image[&v]
    }

    pub fn edge(&self, e: EdgeId) -> EdgeFate {
        self.edge_fate[&e]
    }

    /// Edges of the source that survive, with their target ids.
    pub fn kept_edges(&self) -> impl Iterator<Item = (EdgeId, EdgeId)> + '_ {
        self.edge_fate.iter().filter_map(|(&e, &f)| match f {
            EdgeFate::Kept(t) => Some((e, t)),
            _ => None,
        })
    }
}

/// A block of the block decomposition: either one unit of vertex weight, or a
/// maximal 2-edge-biconnected piece (bridges appear as 2-vertex blocks, loops
/// as 1-vertex blocks).
#[derive(Clone, PartialEq, Eq, Debug)]
pub enum Block {
    WeightUnit {
        anchor: VertexId,
    },
    TwoConnected {
        vertices: BTreeSet<VertexId>,
        edges: BTreeSet<EdgeId>,
    },
}

impl Block {
    /// First Betti number of the underlying subgraph (0 for weight units).
    pub fn betti1(&self) -> u32 {
        match self {
            Block::WeightUnit { .. } => 0,
            Block::TwoConnected { vertices, edges } => {
                (edges.len() + 1 - vertices.len()) as u32
            }
        }
    }
}

/// Connected multigraph with nonnegative integer vertex weights.
#[derive(Clone, PartialEq, Eq)]
pub struct WeightedGraph {
    weights: BTreeMap<VertexId, u32>,
    ends: BTreeMap<EdgeId, (VertexId, VertexId)>,
}

impl fmt::Debug for WeightedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "WeightedGraph {{ vertices: [")?;
        for (i, (v, w)) in self.weights.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{v}:{w}")?;
        }
        write!(f, "], edges: [")?;
        for (i, (e, (a, b))) in self.ends.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}={a}-{b}")?;
        }
        write!(f, "] }}")
    }
}

impl WeightedGraph {
    /// Builds a graph from `(vertex, weight)` pairs and `(edge, a, b)` triples.
    /// Fails on duplicate ids, dangling endpoints, or a disconnected result.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, u32)>,
        edges: impl IntoIterator<Item = (EdgeId, VertexId, VertexId)>,
    ) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (v, w) in vertices {
            if weights.insert(v, w).is_some() {
                return Err(Error::DuplicateVertex(v.0));
            }
        }
        if weights.is_empty() {
            return Err(Error::Empty);
        }
        let mut ends = BTreeMap::new();
        for (e, a, b) in edges {
            if !weights.contains_key(&a) {
                return Err(Error::UnknownVertex(a.0));
            }
            if !weights.contains_key(&b) {
                return Err(Error::UnknownVertex(b.0));
            }
            if ends.insert(e, (a, b)).is_some() {
                return Err(Error::DuplicateEdge(e.0));
            }
        }
        let g = WeightedGraph { weights, ends };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    pub fn n_vertices(&self) -> usize {
        self.weights.len()
    }

    pub fn n_edges(&self) -> usize {
        self.ends.len()
    }

    pub fn vertex_ids(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.weights.keys().copied()
    }

    pub fn edge_ids(&self) -> impl Iterator<Item = EdgeId> + '_ {
        self.ends.keys().copied()
    }

    pub fn has_vertex(&self, v: VertexId) -> bool {
        self.weights.contains_key(&v)
    }

    pub fn has_edge(&self, e: EdgeId) -> bool {
        self.ends.contains_key(&e)
    }

    /// Weight of `v`.  Panics if the vertex does not exist.
    pub fn weight(&self, v: VertexId) -> u32 {
        self.weights[&v]
    }

    /// Endpoints `(anchor of End::A, anchor of End::B)`.  Panics if missing.
    pub fn ends(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.ends[&e]
    }

    pub fn anchor(&self, h: HalfEdge) -> VertexId {
        let (a, b) = self.ends(h.edge);
        match h.end {
            End::A => a,
            End::B => b,
        }
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (a, b) = self.ends(e);
        a == b
    }

    /// Valence of `v`; loops count twice.
    pub fn valence(&self, v: VertexId) -> u32 {
        let mut n = 0;
        for &(a, b) in self.ends.values() {
            if a == v {
                n += 1;
            }
            if b == v {
                n += 1;
            }
        }
        n
    }

    /// Edges incident to `v`, each listed once (loops included once).
    pub fn incident_edges(&self, v: VertexId) -> Vec<EdgeId> {
        self.ends
            .iter()
            .filter(|(_, &(a, b))| a == v || b == v)
            .map(|(&e, _)| e)
            .collect()
    }

    /// Adjacency lists `(edge, other endpoint)`; a loop appears once as
    /// `(e, v)`.
    pub fn adjacency(&self) -> BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> {
        let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
            self.vertex_ids().map(|v| (v, Vec::new())).collect();
        for (&e, &(a, b)) in &self.ends {
            if a == b {
                adj.get_mut(&a).unwrap().push((e, a));
            } else {
                adj.get_mut(&a).unwrap().push((e, b));
                adj.get_mut(&b).unwrap().push((e, a));
            }
        }
        adj
    }

    pub fn total_weight(&self) -> u32 {
        self.weights.values().sum()
    }

    /// First Betti number `|E| - |V| + 1` (the graph is connected).
    pub fn betti1(&self) -> u32 {
        (self.n_edges() + 1 - self.n_vertices()) as u32
    }

    /// Genus `b_1 + total weight`.
    pub fn genus(&self) -> u32 {
        self.betti1() + self.total_weight()
    }

    fn is_connected(&self) -> bool {
        let mut seen = BTreeSet::new();
        let start = match self.vertex_ids().next() {
            Some(v) => v,
            None => return false,
        };
        let adj = self.adjacency();
        let mut queue = VecDeque::from([start]);
        seen.insert(start);
        while let Some(v) = queue.pop_front() {
            for &(_, w) in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.n_vertices()
    }

    /// Is the graph still connected after removing the given edges?
    pub fn connected_without_edges(&self, removed: &BTreeSet<EdgeId>) -> bool {
        let start = match self.vertex_ids().next() {
            Some(v) => v,
            None => return false,
        };
        let mut adj: BTreeMap<VertexId, Vec<VertexId>> =
            self.vertex_ids().map(|v| (v, Vec::new())).collect();
        for (&e, &(a, b)) in &self.ends {
            if removed.contains(&e) || a == b {
                continue;
            }
            adj.get_mut(&a).unwrap().push(b);
            adj.get_mut(&b).unwrap().push(a);
        }
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &w in &adj[&v] {
                if seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        seen.len() == self.n_vertices()
    }

    /// Is the subgraph induced on the given vertex set by the given edge set
    /// connected (and nonempty)?
    pub fn connected_subgraph(
        &self,
        vertices: &BTreeSet<VertexId>,
        edges: &BTreeSet<EdgeId>,
    ) -> bool {
        let start = match vertices.iter().next() {
            Some(&v) => v,
            None => return false,
        };
        let mut seen = BTreeSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(v) = queue.pop_front() {
            for &e in edges {
                let (a, b) = self.ends(e);
                let next = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if vertices.contains(&next) && seen.insert(next) {
                    queue.push_back(next);
                }
            }
        }
        seen.len() == vertices.len()
    }

    /// Stability: every vertex satisfies `2 w(v) - 2 + val(v) > 0`.
    pub fn is_stable(&self) -> bool {
        self.unstable_vertices().is_empty()
    }

    pub fn unstable_vertices(&self) -> Vec<VertexId> {
        self.vertex_ids()
            .filter(|&v| 2 * self.weight(v) as i64 - 2 + self.valence(v) as i64 <= 0)
            .collect()
    }

    /// `d(G) = sum over vertices of (val(v) + 3 w(v) - 3)`; requires stability
    /// so every summand is nonnegative.  Zero exactly on trivalent graphs with
    /// all weights zero.
    pub fn d_invariant(&self) -> Result<u32> {
        if let Some(&v) = self.unstable_vertices().first() {
            return Err(Error::Unstable(v.0));
        }
        let mut d = 0i64;
        for v in self.vertex_ids() {
            d += self.valence(v) as i64 + 3 * self.weight(v) as i64 - 3;
        }
        Ok(d as u32)
    }

    pub fn fresh_vertex_id(&self) -> VertexId {
        VertexId(self.weights.keys().last().map_or(0, |v| v.0 + 1))
    }

    pub fn fresh_edge_id(&self) -> EdgeId {
        EdgeId(self.ends.keys().last().map_or(0, |e| e.0 + 1))
    }

    /// Contracts `e`.  A loop disappears and adds 1 to its vertex weight; a
    /// non-loop edge merges its endpoints into the smaller vertex id, adding
    /// the weights.  Genus is preserved.
    pub fn contract_edge(&self, e: EdgeId) -> Result<(WeightedGraph, EdgeTrace)> {
        let (a, b) = *self.ends.get(&e).ok_or(Error::UnknownEdge(e.0))?;
        let mut weights = self.weights.clone();
        let mut ends = self.ends.clone();
        ends.remove(&e);
        let mut trace = EdgeTrace::identity(self);
        if a == b {
            *weights.get_mut(&a).unwrap() += 1;
            trace.edge_fate.insert(e, EdgeFate::Collapsed(a));
        } else {
            let keep = a.min(b);
            let gone = a.max(b);
            let w_gone = weights.remove(&gone).unwrap();
            *weights.get_mut(&keep).unwrap() += w_gone;
            for (x, y) in ends.values_mut() {
                if *x == gone {
                    *x = keep;
                }
                if *y == gone {
                    *y = keep;
                }
            }
            trace.vertex_image.insert(gone, keep);
            trace.edge_fate.insert(e, EdgeFate::Collapsed(keep));
        }
        let result = WeightedGraph { weights, ends };
        debug_assert_eq!(result.genus(), self.genus());
        Ok((result, trace))
    }

    /// Deletes `e`; fails if that would disconnect the graph.
    pub fn delete_edge(&self, e: EdgeId) -> Result<(WeightedGraph, EdgeTrace)> {
        if !self.has_edge(e) {
            return Err(Error::UnknownEdge(e.0));
        }
        if !self.connected_without_edges(&BTreeSet::from([e])) {
            return Err(Error::WouldDisconnect(e.0));
        }
        let mut ends = self.ends.clone();
        ends.remove(&e);
        let mut trace = EdgeTrace::identity(self);
        trace.edge_fate.insert(e, EdgeFate::Deleted);
        Ok((
            WeightedGraph {
                weights: self.weights.clone(),
                ends,
            },
            trace,
        ))
    }

    /// Materializes a connected subgraph with the original ids and weights.
    pub fn subgraph(
        &self,
        vertices: &BTreeSet<VertexId>,
        edges: &BTreeSet<EdgeId>,
    ) -> Result<WeightedGraph> {
        let vs: Vec<(VertexId, u32)> = vertices.iter().map(|&v| (v, self.weight(v))).collect();
        let es: Vec<(EdgeId, VertexId, VertexId)> = edges
            .iter()
            .map(|&e| {
                let (a, b) = *self.ends.get(&e).ok_or(Error::UnknownEdge(e.0))?;
                Ok((e, a, b))
            })
            .collect::<Result<_>>()?;
        WeightedGraph::new(vs, es)
    }

    pub fn set_weight(&self, v: VertexId, w: u32) -> Result<WeightedGraph> {
        let mut weights = self.weights.clone();
        *weights.get_mut(&v).ok_or(Error::UnknownVertex(v.0))? = w;
        Ok(WeightedGraph {
            weights,
            ends: self.ends.clone(),
        })
    }

    /// Lowers the weight of `v` by one; fails if it is already zero.
    pub fn decrement_weight(&self, v: VertexId) -> Result<WeightedGraph> {
        let mut weights = self.weights.clone();
        let w = weights.get_mut(&v).ok_or(Error::UnknownVertex(v.0))?;
        if *w == 0 {
            return Err(Error::InvalidMove(format!("vertex {v} has weight 0")));
        }
        *w -= 1;
        Ok(WeightedGraph {
            weights,
            ends: self.ends.clone(),
        })
    }

    /// Splits `e = (a, b)` at a new vertex `m`, producing `first = (a, m)` and
    /// `second = (m, b)` with fresh edge ids.
    pub fn subdivide_edge(&self, e: EdgeId) -> Result<(WeightedGraph, Subdivision)> {
        let (a, b) = *self.ends.get(&e).ok_or(Error::UnknownEdge(e.0))?;
        let m = self.fresh_vertex_id();
        let first = self.fresh_edge_id();
        let second = EdgeId(first.0 + 1);
        let mut weights = self.weights.clone();
        weights.insert(m, 0);
        let mut ends = self.ends.clone();
        ends.remove(&e);
        ends.insert(first, (a, m));
        ends.insert(second, (m, b));
        Ok((
            WeightedGraph { weights, ends },
            Subdivision {
                original: e,
                midpoint: m,
                first,
                second,
            },
        ))
    }

    /// Moves the anchor of half-edge `h` from its current vertex to `to`.
    /// Used by the ear-decomposition surgeries.  Fails if the result would be
    /// disconnected.
    pub fn reanchor(&self, h: HalfEdge, to: VertexId) -> Result<WeightedGraph> {
        if !self.has_vertex(to) {
            return Err(Error::UnknownVertex(to.0));
        }
        let (a, b) = *self.ends.get(&h.edge).ok_or(Error::UnknownEdge(h.edge.0))?;
        let mut ends = self.ends.clone();
        let pair = match h.end {
            End::A => (to, b),
            End::B => (a, to),
        };
        ends.insert(h.edge, pair);
        let g = WeightedGraph {
            weights: self.weights.clone(),
            ends,
        };
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Block decomposition: one `WeightUnit` per unit of vertex weight, plus
    /// the maximal 2-connected subgraphs (bridges and loops included as their
    /// own blocks).  Blocks are returned in a deterministic order.
    pub fn blocks(&self) -> Vec<Block> {
        let mut out = Vec::new();
        for (&v, &w) in &self.weights {
            for _ in 0..w {
                out.push(Block::WeightUnit { anchor: v });
            }
        }

        // Loops form their own blocks.
        for (&e, &(a, b)) in &self.ends {
            if a == b {
                out.push(Block::TwoConnected {
                    vertices: BTreeSet::from([a]),
                    edges: BTreeSet::from([e]),
                });
            }
        }

        // Standard DFS biconnectivity on the loopless part; parallel edges are
        // handled by skipping only the entering edge id, not the parent vertex.
        let adj = {
            let mut adj: BTreeMap<VertexId, Vec<(EdgeId, VertexId)>> =
                self.vertex_ids().map(|v| (v, Vec::new())).collect();
            for (&e, &(a, b)) in &self.ends {
                if a != b {
                    adj.get_mut(&a).unwrap().push((e, b));
                    adj.get_mut(&b).unwrap().push((e, a));
                }
            }
            adj
        };
        let mut disc: BTreeMap<VertexId, u32> = BTreeMap::new();
        let mut low: BTreeMap<VertexId, u32> = BTreeMap::new();
        let mut stack: Vec<EdgeId> = Vec::new();
        let mut timer = 0u32;

        // Iterative DFS: frame = (vertex, entering edge, iterator index).
        for root in self.vertex_ids() {
            if disc.contains_key(&root) {
                continue;
            }
            let mut frames: Vec<(VertexId, Option<EdgeId>, usize)> = vec![(root, None, 0)];
            disc.insert(root, timer);
            low.insert(root, timer);
            timer += 1;
            while let Some(&mut (v, enter, ref mut idx)) = frames.last_mut() {
                if *idx < adj[&v].len() {
                    let (e, w) = adj[&v][*idx];
                    *idx += 1;
                    if Some(e) == enter {
                        continue;
                    }
                    if let Some(&dw) = disc.get(&w) {
                        if dw < disc[&v] {
                            stack.push(e);
                            let lv = low.get_mut(&v).unwrap();
                            *lv = (*lv).min(dw);
                        }
                    } else {
                        stack.push(e);
                        disc.insert(w, timer);
                        low.insert(w, timer);
                        timer += 1;
                        frames.push((w, Some(e), 0));
                    }
                } else {
                    frames.pop();
                    if let Some(&mut (parent, _, _)) = frames.last_mut() {
                        let lv = low[&v];
                        let lp = low.get_mut(&parent).unwrap();
                        *lp = (*lp).min(lv);
                        if lv >= disc[&parent] {
                            // Pop the component rooted at the tree edge
                            // parent -> v.
                            let mut comp = BTreeSet::new();
                            while let Some(&e) = stack.last() {
                                let (a, b) = self.ends(e);
                                let da = disc[&a].min(disc[&b]);
                                if da >= disc[&parent] {
                                    comp.insert(stack.pop().unwrap());
                                } else {
                                    break;
                                }
                            }
                            if !comp.is_empty() {
                                let mut vs = BTreeSet::new();
                                for &e in &comp {
                                    let (a, b) = self.ends(e);
                                    vs.insert(a);
                                    vs.insert(b);
                                }
                                out.push(Block::TwoConnected {
                                    vertices: vs,
                                    edges: comp,
                                });
                            }
                        }
                    }
                }
            }
        }
        out.sort_by_key(|b| match b {
            Block::WeightUnit { anchor } => (0, Some(*anchor), None),
            Block::TwoConnected { vertices, edges } => {
                (1, vertices.iter().next().copied(), edges.iter().next().copied())
            }
        });
        out
    }

    /// Cut structure only: true when the block decomposition (ignoring weight
    /// units) is a single block containing every vertex, and that block is
    /// not a bridge.  Two vertices joined by parallel edges qualify; a lone
    /// loop qualifies; any bridge or articulation point disqualifies.
    pub fn is_two_connected_shape(&self) -> bool {
        let blocks: Vec<Block> = self
            .blocks()
            .into_iter()
            .filter(|b| matches!(b, Block::TwoConnected { .. }))
            .collect();
        let [Block::TwoConnected { vertices, edges }] = blocks.as_slice() else {
            return false;
        };
        if vertices.len() != self.n_vertices() {
            return false;
        }
        // A single non-loop edge is a bridge, not a 2-connected block.
        !(edges.len() == 1 && !self.is_loop(*edges.iter().next().unwrap()))
    }
}

/// Outcome of splitting one edge at a fresh midpoint.
#[derive(Clone, Copy, Debug)]
pub struct Subdivision {
    pub original: EdgeId,
    pub midpoint: VertexId,
    pub first: EdgeId,
    pub second: EdgeId,
}

/// A weighted graph together with a positive rational length per edge.
#[derive(Clone, PartialEq, Eq)]
pub struct TropicalCurve {
    graph: WeightedGraph,
    lengths: BTreeMap<EdgeId, Rat>,
}

impl fmt::Debug for TropicalCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TropicalCurve {{ {:?}, lengths: [", self.graph)?;
        for (i, (e, l)) in self.lengths.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{e}={l}")?;
        }
        write!(f, "] }}")
    }
}

impl TropicalCurve {
    pub fn new(graph: WeightedGraph, lengths: BTreeMap<EdgeId, Rat>) -> Result<Self> {
        for e in graph.edge_ids() {
            match lengths.get(&e) {
                None => return Err(Error::MissingLength(e.0)),
                Some(l) if *l <= Rat::zero() => return Err(Error::NonpositiveLength(e.0)),
                _ => {}
            }
        }
        for e in lengths.keys() {
            if !graph.has_edge(*e) {
                return Err(Error::UnknownEdge(e.0));
            }
        }
        Ok(TropicalCurve { graph, lengths })
    }

    /// All lengths equal to 1.
    pub fn with_unit_lengths(graph: WeightedGraph) -> Self {
        let lengths = graph.edge_ids().map(|e| (e, rat(1))).collect();
        TropicalCurve { graph, lengths }
    }

    pub fn graph(&self) -> &WeightedGraph {
        &self.graph
    }

    pub fn length(&self, e: EdgeId) -> &Rat {
        &self.lengths[&e]
    }

    pub fn lengths(&self) -> &BTreeMap<EdgeId, Rat> {
        &self.lengths
    }

    pub fn genus(&self) -> u32 {
        self.graph.genus()
    }

    pub fn is_stable(&self) -> bool {
        self.graph.is_stable()
    }

    pub fn total_length(&self) -> Rat {
        self.lengths.values().fold(Rat::zero(), |a, b| a + b)
    }

    /// Applies a trace to the length function: merged edges add lengths.
    fn push_lengths(&self, trace: &EdgeTrace) -> BTreeMap<EdgeId, Rat> {
        let mut out: BTreeMap<EdgeId, Rat> = BTreeMap::new();
        for (e, fate) in &trace.edge_fate {
            if let EdgeFate::Kept(t) = fate {
                let l = out.entry(*t).or_insert_with(Rat::zero);
                *l += self.lengths[e].clone();
            }
        }
        out
    }

    pub fn contract_edge(&self, e: EdgeId) -> Result<(TropicalCurve, EdgeTrace)> {
        let (graph, trace) = self.graph.contract_edge(e)?;
        let lengths = self.push_lengths(&trace);
        Ok((TropicalCurve { graph, lengths }, trace))
    }

    pub fn delete_edge(&self, e: EdgeId) -> Result<(TropicalCurve, EdgeTrace)> {
        let (graph, trace) = self.graph.delete_edge(e)?;
        let lengths = self.push_lengths(&trace);
        Ok((TropicalCurve { graph, lengths }, trace))
    }

    /// Splits `e` at distance `at` from its `End::A` anchor; `first` gets
    /// length `at`, `second` the remainder.
    pub fn subdivide_edge(&self, e: EdgeId, at: &Rat) -> Result<(TropicalCurve, Subdivision)> {
        if !self.graph.has_edge(e) {
            return Err(Error::UnknownEdge(e.0));
        }
        let total = self.lengths[&e].clone();
        if *at <= Rat::zero() || *at >= total {
            return Err(Error::InvalidMove(format!(
                "subdivision point {at} outside the open interval (0, {total}) of {e}"
            )));
        }
        let (graph, sub) = self.graph.subdivide_edge(e)?;
        let mut lengths = self.lengths.clone();
        lengths.remove(&e);
        lengths.insert(sub.first, at.clone());
        lengths.insert(sub.second, total - at);
        Ok((TropicalCurve { graph, lengths }, sub))
    }

    /// Moves the anchor of half-edge `h` to `to`; lengths are unchanged.
    pub fn reanchor(&self, h: HalfEdge, to: VertexId) -> Result<TropicalCurve> {
        let graph = self.graph.reanchor(h, to)?;
        Ok(TropicalCurve {
            graph,
            lengths: self.lengths.clone(),
        })
    }

    /// Iteratively removes 1-valent weight-0 vertices and suppresses 2-valent
    /// weight-0 vertices that are not incident to loops (the two incident
    /// edges merge, lengths adding).  Requires genus at least 2; the result is
    /// stable of the same genus, and the trace maps the input onto it.
    pub fn stable_model(&self) -> Result<(TropicalCurve, EdgeTrace)> {
        if self.genus() < 2 {
            return Err(Error::GenusTooSmall {
                required: 2,
                found: self.genus(),
            });
        }
        let mut cur = self.clone();
        let mut trace = EdgeTrace::identity(&self.graph);
        loop {
            let g = &cur.graph;
            let candidate = g.vertex_ids().find(|&v| {
                g.weight(v) == 0
                    && (g.valence(v) == 1
                        || (g.valence(v) == 2
                            && !g.incident_edges(v).iter().any(|&e| g.is_loop(e))))
            });
            let Some(v) = candidate else { break };
            if g.valence(v) == 1 {
                let e = g.incident_edges(v)[0];
                let (a, b) = g.ends(e);
                let keep = if a == v { b } else { a };
                let mut weights = g.weights.clone();
                weights.remove(&v);
                let mut ends = g.ends.clone();
                ends.remove(&e);
                let mut lengths = cur.lengths.clone();
                lengths.remove(&e);
                let mut step = EdgeTrace::identity(g);
                step.vertex_image.insert(v, keep);
                step.edge_fate.insert(e, EdgeFate::Collapsed(keep));
                cur = TropicalCurve {
                    graph: WeightedGraph { weights, ends },
                    lengths,
                };
                trace = trace.then(&step);
            } else {
                let inc = g.incident_edges(v);
                let (e1, e2) = (inc[0], inc[1]);
                let keep = e1.min(e2);
                let gone = e1.max(e2);
                let (a1, b1) = g.ends(e1);
                let other1 = if a1 == v { b1 } else { a1 };
                let (a2, b2) = g.ends(e2);
                let other2 = if a2 == v { b2 } else { a2 };
                let (oa, ob) = if keep == e1 {
                    (other1, other2)
                } else {
                    (other2, other1)
                };
                let mut weights = g.weights.clone();
                weights.remove(&v);
                let mut ends = g.ends.clone();
                ends.remove(&gone);
                ends.insert(keep, (oa, ob));
                let sum = cur.lengths[&e1].clone() + cur.lengths[&e2].clone();
                let mut lengths = cur.lengths.clone();
                lengths.remove(&gone);
                lengths.insert(keep, sum);
                let mut step = EdgeTrace::identity(g);
                step.vertex_image.insert(v, oa);
                step.edge_fate.insert(gone, EdgeFate::Kept(keep));
                cur = TropicalCurve {
                    graph: WeightedGraph { weights, ends },
                    lengths,
                };
                trace = trace.then(&step);
            }
        }
        debug_assert_eq!(cur.genus(), self.genus());
        debug_assert!(cur.is_stable(), "stable model left unstable vertices");
        Ok((cur, trace))
    }

    /// Replaces the length function wholesale (same edge set required).
    pub fn with_lengths(&self, lengths: BTreeMap<EdgeId, Rat>) -> Result<TropicalCurve> {
        TropicalCurve::new(self.graph.clone(), lengths)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    #[test]
    fn genus_counts_cycles_and_weights() {
        let theta = fixtures::theta(rat(1), rat(1), rat(1));
        assert_eq!(theta.genus(), 2);
        let k4 = fixtures::k4_unit();
        assert_eq!(k4.genus(), 3);
        let single = WeightedGraph::new([(VertexId(0), 3)], []).unwrap();
        assert_eq!(single.genus(), 3);
        assert_eq!(single.betti1(), 0);
    }

    #[test]
    fn valence_counts_loops_twice() {
        let dumb = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let g = dumb.graph();
        for v in g.vertex_ids() {
            assert_eq!(g.valence(v), 3);
        }
        assert!(g.is_stable());
    }

    #[test]
    fn stability_examples() {
        // Isolated weight-1 vertex: 2*1 - 2 + 0 = 0, not positive.
        let w1 = WeightedGraph::new([(VertexId(0), 1)], []).unwrap();
        assert!(!w1.is_stable());
        let w2 = WeightedGraph::new([(VertexId(0), 2)], []).unwrap();
        assert!(w2.is_stable());
        // Weight-1 vertex with a loop: 2 - 2 + 2 > 0.
        let loop1 = WeightedGraph::new(
            [(VertexId(0), 1)],
            [(EdgeId(0), VertexId(0), VertexId(0))],
        )
        .unwrap();
        assert!(loop1.is_stable());
    }

    #[test]
    fn contraction_preserves_genus() {
        let theta = fixtures::theta(rat(1), rat(2), rat(3));
        let (c, trace) = theta.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(c.genus(), 2);
        assert_eq!(c.graph().n_vertices(), 1);
        // Remaining parallel edges become loops.
        assert!(c.graph().is_loop(EdgeId(1)));
        assert!(c.graph().is_loop(EdgeId(2)));
        assert_eq!(trace.edge(EdgeId(0)), EdgeFate::Collapsed(VertexId(0)));

        // Contracting a loop raises the weight.
        let dumb = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let loop_edge = dumb
            .graph()
            .edge_ids()
            .find(|&e| dumb.graph().is_loop(e))
            .unwrap();
        let (c2, _) = dumb.contract_edge(loop_edge).unwrap();
        assert_eq!(c2.genus(), 2);
        assert_eq!(c2.graph().total_weight(), 1);
    }

    #[test]
    fn deletion_guards_connectivity() {
        let dumb = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let bridge = dumb
            .graph()
            .edge_ids()
            .find(|&e| !dumb.graph().is_loop(e))
            .unwrap();
        assert!(matches!(
            dumb.delete_edge(bridge),
            Err(Error::WouldDisconnect(_))
        ));
        let theta = fixtures::theta(rat(1), rat(1), rat(1));
        let (c, _) = theta.delete_edge(EdgeId(1)).unwrap();
        assert_eq!(c.genus(), 1);
    }

    #[test]
    fn stable_model_collapses_trees_and_subdivisions() {
        // Theta with one edge subdivided and a dangling path: the model is the
        // theta with that edge's pieces re-merged and the path pruned.
        let theta = fixtures::theta(rat(1), rat(2), rat(3));
        let (sub, s) = theta.subdivide_edge(EdgeId(1), &rat(1)).unwrap();
        // Attach a pendant path of two edges at the midpoint.
        let g = sub.graph();
        let p1 = g.fresh_vertex_id();
        let p2 = VertexId(p1.0 + 1);
        let f1 = g.fresh_edge_id();
        let f2 = EdgeId(f1.0 + 1);
        let mut vs: Vec<_> = g.vertex_ids().map(|v| (v, g.weight(v))).collect();
        vs.push((p1, 0));
        vs.push((p2, 0));
        let mut es: Vec<_> = g
            .edge_ids()
            .map(|e| {
                let (a, b) = g.ends(e);
                (e, a, b)
            })
            .collect();
        es.push((f1, s.midpoint, p1));
        es.push((f2, p1, p2));
        let mut lengths = sub.lengths().clone();
        lengths.insert(f1, rat(5));
        lengths.insert(f2, rat(7));
        let messy =
            TropicalCurve::new(WeightedGraph::new(vs, es).unwrap(), lengths).unwrap();
        assert!(!messy.is_stable());

        let (model, trace) = messy.stable_model().unwrap();
        assert!(model.is_stable());
        assert_eq!(model.genus(), 2);
        assert_eq!(model.graph().n_vertices(), 2);
        assert_eq!(model.graph().n_edges(), 3);
        // The two pieces of the subdivided edge were re-merged: some surviving
        // edge has length 2 again.
        let merged = trace.edge(s.first);
        let EdgeFate::Kept(m) = merged else {
            panic!("subdivided piece should survive")
        };
        assert_eq!(model.length(m), &rat(2));
        // Pendant edges retract onto the curve.
        assert!(matches!(trace.edge(f2), EdgeFate::Collapsed(_)));
        // Idempotent.
        let (again, _) = model.stable_model().unwrap();
        assert_eq!(again, model);
    }

    #[test]
    fn stable_model_turns_two_cycle_into_loop() {
        // A 2-cycle hanging on a theta via suppression produces a loop.
        let g = WeightedGraph::new(
            [(VertexId(0), 0), (VertexId(1), 0), (VertexId(2), 0)],
            [
                (EdgeId(0), VertexId(0), VertexId(1)),
                (EdgeId(1), VertexId(0), VertexId(1)),
                (EdgeId(2), VertexId(0), VertexId(1)),
                (EdgeId(3), VertexId(0), VertexId(2)),
                (EdgeId(4), VertexId(2), VertexId(0)),
            ],
        )
        .unwrap();
        let curve = TropicalCurve::with_unit_lengths(g);
        let (model, _) = curve.stable_model().unwrap();
        assert!(model.is_stable());
        assert_eq!(model.genus(), 3);
        let loops: Vec<_> = model
            .graph()
            .edge_ids()
            .filter(|&e| model.graph().is_loop(e))
            .collect();
        assert_eq!(loops.len(), 1);
        assert_eq!(model.length(loops[0]), &rat(2));
    }

    #[test]
    fn stable_model_requires_genus_two() {
        let cycle = fixtures::cycle(&[rat(1), rat(1), rat(1)]);
        assert!(matches!(
            cycle.stable_model(),
            Err(Error::GenusTooSmall { .. })
        ));
    }

    #[test]
    fn blocks_of_dumbbell() {
        let dumb = fixtures::dumbbell(rat(1), rat(1), rat(1));
        let blocks = dumb.graph().blocks();
        assert_eq!(blocks.len(), 3);
        let b1s: Vec<u32> = blocks.iter().map(|b| b.betti1()).collect();
        assert_eq!(b1s.iter().filter(|&&x| x == 1).count(), 2); // the loops
        assert_eq!(b1s.iter().filter(|&&x| x == 0).count(), 1); // the bridge
    }

    #[test]
    fn blocks_of_two_connected_graph_is_single() {
        let k4 = fixtures::k4_unit();
        let blocks = k4.blocks();
        assert_eq!(blocks.len(), 1);
        assert!(matches!(&blocks[0], Block::TwoConnected { edges, .. } if edges.len() == 6));
    }

    #[test]
    fn weight_units_are_blocks() {
        let g = WeightedGraph::new(
            [(VertexId(0), 2)],
            [(EdgeId(0), VertexId(0), VertexId(0))],
        )
        .unwrap();
        let blocks = g.blocks();
        assert_eq!(blocks.len(), 3);
        assert_eq!(
            blocks
                .iter()
                .filter(|b| matches!(b, Block::WeightUnit { .. }))
                .count(),
            2
        );
    }

    #[test]
    fn d_invariant_values() {
        let theta = fixtures::theta(rat(1), rat(1), rat(1));
        assert_eq!(theta.graph().d_invariant().unwrap(), 0);
        let k4 = fixtures::k4_unit();
        assert_eq!(k4.d_invariant().unwrap(), 0);
        // Contracting one edge of K4 adds 1.
        let (c, _) = k4.contract_edge(EdgeId(0)).unwrap();
        assert_eq!(c.d_invariant().unwrap(), 1);
        // Single weight-2 vertex: 0 + 6 - 3 = 3.
        let w2 = WeightedGraph::new([(VertexId(0), 2)], []).unwrap();
        assert_eq!(w2.d_invariant().unwrap(), 3);
    }

    #[test]
    fn traces_compose() {
        let theta = fixtures::theta(rat(1), rat(2), rat(4));
        let (c1, t1) = theta.contract_edge(EdgeId(0)).unwrap();
        let (_c2, t2) = c1.contract_edge(EdgeId(1)).unwrap();
        let t = t1.then(&t2);
        assert_eq!(t.edge(EdgeId(0)), EdgeFate::Collapsed(VertexId(0)));
        assert_eq!(t.edge(EdgeId(1)), EdgeFate::Collapsed(VertexId(0)));
        assert_eq!(t.edge(EdgeId(2)), EdgeFate::Kept(EdgeId(2)));
        assert_eq!(t.vertex(VertexId(1)), VertexId(0));
    }

    #[test]
    fn subdivision_splits_lengths() {
        let theta = fixtures::theta(rat(4), rat(1), rat(1));
        let (c, s) = theta.subdivide_edge(EdgeId(0), &rat(3)).unwrap();
        assert_eq!(c.length(s.first), &rat(3));
        assert_eq!(c.length(s.second), &rat(1));
        assert_eq!(c.genus(), 2);
        assert!(!c.graph().has_edge(EdgeId(0)));
    }
}
