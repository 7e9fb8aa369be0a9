//! Small named graphs and curves used by tests, docs, and the CLI examples.

use std::collections::BTreeMap;

use crate::graph::{rat, EdgeId, Rat, TropicalCurve, VertexId, WeightedGraph};

fn v(n: u32) -> VertexId {
    VertexId(n)
}

fn e(n: u32) -> EdgeId {
    EdgeId(n)
}

/// Two vertices joined by three parallel edges; genus 2.
pub fn theta(a: Rat, b: Rat, c: Rat) -> TropicalCurve {
    let g = WeightedGraph::new(
        [(v(0), 0), (v(1), 0)],
        [(e(0), v(0), v(1)), (e(1), v(0), v(1)), (e(2), v(0), v(1))],
    )
    .unwrap();
    TropicalCurve::new(g, BTreeMap::from([(e(0), a), (e(1), b), (e(2), c)])).unwrap()
}

/// Complete graph on four vertices; genus 3.
pub fn k4_unit() -> WeightedGraph {
    WeightedGraph::new(
        [(v(0), 0), (v(1), 0), (v(2), 0), (v(3), 0)],
        [
            (e(0), v(0), v(1)),
            (e(1), v(0), v(2)),
            (e(2), v(0), v(3)),
            (e(3), v(1), v(2)),
            (e(4), v(1), v(3)),
            (e(5), v(2), v(3)),
        ],
    )
    .unwrap()
}

/// Triangle with every edge doubled (the "loop of three loops"); genus 4.
pub fn l3_unit() -> WeightedGraph {
    WeightedGraph::new(
        [(v(0), 0), (v(1), 0), (v(2), 0)],
        [
            (e(0), v(0), v(1)),
            (e(1), v(0), v(1)),
            (e(2), v(1), v(2)),
            (e(3), v(1), v(2)),
            (e(4), v(0), v(2)),
            (e(5), v(0), v(2)),
        ],
    )
    .unwrap()
}

/// Two vertices joined by a parallel pair `e0, e1`, with one loop at each
/// vertex (`e2` at `v0`, `e3` at `v1`); genus 3.
pub fn fig1_full(e0_len: Rat, e1_len: Rat, loop0: Rat, loop1: Rat) -> TropicalCurve {
    let g = WeightedGraph::new(
        [(v(0), 0), (v(1), 0)],
        [
            (e(0), v(0), v(1)),
            (e(1), v(0), v(1)),
            (e(2), v(0), v(0)),
            (e(3), v(1), v(1)),
        ],
    )
    .unwrap();
    TropicalCurve::new(
        g,
        BTreeMap::from([(e(0), e0_len), (e(1), e1_len), (e(2), loop0), (e(3), loop1)]),
    )
    .unwrap()
}

/// [`fig1_full`] with unit loops.
pub fn fig1(e0_len: Rat, e1_len: Rat) -> TropicalCurve {
    fig1_full(e0_len, e1_len, rat(1), rat(1))
}

/// Three vertices `u, v, w` with `u-v` doubled, `v-w` doubled, and a single
/// `u-w` edge; genus 3.  Edge ids: `e0, e1 = u-v`, `e2, e3 = v-w`, `e4 = u-w`.
pub fn b2_unit() -> WeightedGraph {
    WeightedGraph::new(
        [(v(0), 0), (v(1), 0), (v(2), 0)],
        [
            (e(0), v(0), v(1)),
            (e(1), v(0), v(1)),
            (e(2), v(1), v(2)),
            (e(3), v(1), v(2)),
            (e(4), v(0), v(2)),
        ],
    )
    .unwrap()
}

pub fn b2_curve() -> TropicalCurve {
    TropicalCurve::with_unit_lengths(b2_unit())
}

/// Cycle on `lengths.len()` vertices (a single loop when the slice has one
/// entry, a parallel pair when it has two).
pub fn cycle(lengths: &[Rat]) -> TropicalCurve {
    let n = lengths.len() as u32;
    assert!(n >= 1);
    let g = WeightedGraph::new(
        (0..n).map(|i| (v(i), 0)),
        (0..n).map(|i| (e(i), v(i), v((i + 1) % n))),
    )
    .unwrap();
    TropicalCurve::new(
        g,
        lengths
            .iter()
            .enumerate()
            .map(|(i, l)| (e(i as u32), l.clone()))
            .collect(),
    )
    .unwrap()
}

/// Two loops joined by a bridge; genus 2.  `e0` is the loop at `v0`, `e1` the
/// bridge, `e2` the loop at `v1`.
pub fn dumbbell(loop0: Rat, bar: Rat, loop1: Rat) -> TropicalCurve {
    let g = WeightedGraph::new(
        [(v(0), 0), (v(1), 0)],
        [(e(0), v(0), v(0)), (e(1), v(0), v(1)), (e(2), v(1), v(1))],
    )
    .unwrap();
    TropicalCurve::new(g, BTreeMap::from([(e(0), loop0), (e(1), bar), (e(2), loop1)]))
        .unwrap()
}

/// Triangular prism: two triangles joined by a perfect matching; genus 4.
pub fn prism_unit() -> WeightedGraph {
    WeightedGraph::new(
        (0..6).map(|i| (v(i), 0)),
        [
            (e(0), v(0), v(1)),
            (e(1), v(1), v(2)),
            (e(2), v(2), v(0)),
            (e(3), v(3), v(4)),
            (e(4), v(4), v(5)),
            (e(5), v(5), v(3)),
            (e(6), v(0), v(3)),
            (e(7), v(1), v(4)),
            (e(8), v(2), v(5)),
        ],
    )
    .unwrap()
}

/// Two triangles glued along the vertex pair `{u, v}` plus the `u-v` edge,
/// and the same graph with one triangle re-glued the other way around.  With
/// the chosen lengths the curves are not isomorphic, but the identity-like
/// edge correspondence `e2 <-> e3` is a length-preserving 2-isomorphism.
pub fn whitney_pair() -> (TropicalCurve, TropicalCurve) {
    let build = |ub: i64, bv: i64| {
        let g = WeightedGraph::new(
            [(v(0), 0), (v(1), 0), (v(2), 0), (v(3), 0)],
            [
                (e(0), v(0), v(2)), // u-a
                (e(1), v(2), v(1)), // a-v
                (e(2), v(0), v(3)), // u-b
                (e(3), v(3), v(1)), // b-v
                (e(4), v(0), v(1)), // u-v
            ],
        )
        .unwrap();
        TropicalCurve::new(
            g,
            BTreeMap::from([
                (e(0), rat(1)),
                (e(1), rat(2)),
                (e(2), rat(ub)),
                (e(3), rat(bv)),
                (e(4), rat(5)),
            ]),
        )
        .unwrap()
    };
    (build(3, 4), build(4, 3))
}
