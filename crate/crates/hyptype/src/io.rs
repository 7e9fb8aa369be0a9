//! JSON interchange: the graph document format plus serialized forms of
//! involutions, minor models, certificates, and the reports the command-line
//! tool emits.  Parse errors carry the path to the offending field; emitted
//! rationals are in lowest terms, and parsing an emitted document gives back
//! an equal document.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use crate::decision::{
    Forbidden, GramMatrix, HyptypeCertificate, NegativeCertificate, PositiveCertificate,
};
use crate::error::{Error, Result};
use crate::graph::{EdgeId, End, HalfEdge, Rat, TropicalCurve, VertexId, WeightedGraph};
use crate::hyperelliptic::Involution;
use crate::matroid::TwoIsomorphism;
use crate::minors::MinorModel;

/// Bidirectional table between internal ids and the id strings of a document.
/// Ids missing from the table fall back to their `v{n}` / `e{n}` form.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Names {
    v_name: BTreeMap<VertexId, String>,
    e_name: BTreeMap<EdgeId, String>,
    v_id: BTreeMap<String, VertexId>,
    e_id: BTreeMap<String, EdgeId>,
}

impl Names {
    /// `v{n}` / `e{n}` for every id of the graph.
    pub fn canonical(g: &WeightedGraph) -> Names {
        let mut names = Names::default();
        names.extend(g);
        names
    }

    pub fn vertex(&self, v: VertexId) -> String {
        self.v_name.get(&v).cloned().unwrap_or_else(|| v.to_string())
    }

    pub fn edge(&self, e: EdgeId) -> String {
        self.e_name.get(&e).cloned().unwrap_or_else(|| e.to_string())
    }

    pub fn vertex_id(&self, name: &str) -> Option<VertexId> {
        self.v_id.get(name).copied()
    }

    pub fn edge_id(&self, name: &str) -> Option<EdgeId> {
        self.e_id.get(name).copied()
    }

    pub fn insert_vertex(&mut self, v: VertexId, name: String) {
        self.v_id.insert(name.clone(), v);
        self.v_name.insert(v, name);
    }

    pub fn insert_edge(&mut self, e: EdgeId, name: String) {
        self.e_id.insert(name.clone(), e);
        self.e_name.insert(e, name);
    }

    /// Registers any id of `g` that has no name yet, keeping names unique.
    pub fn extend(&mut self, g: &WeightedGraph) {
        for v in g.vertex_ids() {
            if !self.v_name.contains_key(&v) {
                let mut name = v.to_string();
                while self.v_id.contains_key(&name) {
                    name.push('_');
                }
                self.insert_vertex(v, name);
            }
        }
        for e in g.edge_ids() {
            if !self.e_name.contains_key(&e) {
                let mut name = e.to_string();
                while self.e_id.contains_key(&name) {
                    name.push('_');
                }
                self.insert_edge(e, name);
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDoc {
    pub id: String,
    #[serde(default)]
    pub weight: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDoc {
    pub id: String,
    pub ends: [String; 2],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub length: Option<String>,
}

/// The on-disk form of a curve.  Absent lengths default to 1 with a warning;
/// absent weights default to 0.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphDocument {
    pub vertices: Vec<VertexDoc>,
    pub edges: Vec<EdgeDoc>,
}

/// A parsed document: the curve, the id table, and any default warnings.
#[derive(Clone, Debug)]
pub struct ParsedCurve {
    pub curve: TropicalCurve,
    pub names: Names,
    pub warnings: Vec<String>,
}

fn parse_rational(s: &str) -> std::result::Result<Rat, String> {
    let t = s.trim();
    let (n, d) = match t.split_once('/') {
        Some((n, d)) => (n, d),
        None => (t, "1"),
    };
    let n: BigInt = n
        .trim()
        .parse()
        .map_err(|_| format!("invalid rational {t:?}"))?;
    let d: BigInt = d
        .trim()
        .parse()
        .map_err(|_| format!("invalid rational {t:?}"))?;
    if d == BigInt::from(0) {
        return Err(format!("zero denominator in {t:?}"));
    }
    Ok(Rat::new(n, d))
}

pub fn parse_graph(text: &str) -> Result<ParsedCurve> {
    let doc: GraphDocument =
        serde_json::from_str(text).map_err(|e| Error::Document(format!("invalid JSON: {e}")))?;
    parse_graph_document(&doc)
}

/// Internal ids are assigned in document order, so serializing the result
/// reproduces the document (with rationals put in lowest terms).
pub fn parse_graph_document(doc: &GraphDocument) -> Result<ParsedCurve> {
    let mut names = Names::default();
    let mut verts = Vec::new();
    for (i, v) in doc.vertices.iter().enumerate() {
        if names.vertex_id(&v.id).is_some() {
            return Err(Error::Document(format!(
                "vertices[{i}].id: duplicate id {:?}",
                v.id
            )));
        }
        let id = VertexId(i as u32);
        names.insert_vertex(id, v.id.clone());
        verts.push((id, v.weight));
    }
    let mut edges = Vec::new();
    let mut lengths = BTreeMap::new();
    let mut warnings = Vec::new();
    for (j, e) in doc.edges.iter().enumerate() {
        if names.edge_id(&e.id).is_some() {
            return Err(Error::Document(format!(
                "edges[{j}].id: duplicate id {:?}",
                e.id
            )));
        }
        let id = EdgeId(j as u32);
        names.insert_edge(id, e.id.clone());
        let mut ends = [VertexId(0); 2];
        for (k, name) in e.ends.iter().enumerate() {
            ends[k] = names.vertex_id(name).ok_or_else(|| {
                Error::Document(format!("edges[{j}].ends[{k}]: unknown vertex {name:?}"))
            })?;
        }
        edges.push((id, ends[0], ends[1]));
        let len = match &e.length {
            Some(s) => parse_rational(s)
                .map_err(|msg| Error::Document(format!("edges[{j}].length: {msg}")))?,
            None => {
                warnings.push(format!(
                    "edges[{j}] ({:?}): no length given, defaulting to 1",
                    e.id
                ));
                Rat::from(BigInt::from(1))
            }
        };
        if len <= Rat::from(BigInt::from(0)) {
            return Err(Error::Document(format!(
                "edges[{j}].length: must be positive, got {len}"
            )));
        }
        lengths.insert(id, len);
    }
    let graph =
        WeightedGraph::new(verts, edges).map_err(|e| Error::Document(format!("graph: {e}")))?;
    let curve =
        TropicalCurve::new(graph, lengths).map_err(|e| Error::Document(format!("graph: {e}")))?;
    Ok(ParsedCurve {
        curve,
        names,
        warnings,
    })
}

pub fn graph_document(c: &TropicalCurve, names: &Names) -> GraphDocument {
    let g = c.graph();
    GraphDocument {
        vertices: g
            .vertex_ids()
            .map(|v| VertexDoc {
                id: names.vertex(v),
                weight: g.weight(v),
            })
            .collect(),
        edges: g
            .edge_ids()
            .map(|e| {
                let (a, b) = g.ends(e);
                EdgeDoc {
                    id: names.edge(e),
                    ends: [names.vertex(a), names.vertex(b)],
                    length: Some(c.length(e).to_string()),
                }
            })
            .collect(),
    }
}

/// Graph without lengths, for minor patterns and shape-only output.
pub fn shape_document(g: &WeightedGraph, names: &Names) -> GraphDocument {
    let mut doc = graph_document(&TropicalCurve::with_unit_lengths(g.clone()), names);
    for e in &mut doc.edges {
        e.length = None;
    }
    doc
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable document");
    s.push('\n');
    s
}

/// The image of one edge under an involution: the partner edge, and whether
/// the ends swap along the way.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeImageDoc {
    pub edge: String,
    pub reversed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct InvolutionDoc {
    pub vertices: BTreeMap<String, String>,
    pub edges: BTreeMap<String, EdgeImageDoc>,
}

pub fn involution_document(inv: &Involution, g: &WeightedGraph, names: &Names) -> InvolutionDoc {
    InvolutionDoc {
        vertices: g
            .vertex_ids()
            .map(|v| (names.vertex(v), names.vertex(inv.vertex(v))))
            .collect(),
        edges: g
            .edge_ids()
            .map(|e| {
                let image = inv.half(HalfEdge::new(e, End::A));
                (
                    names.edge(e),
                    EdgeImageDoc {
                        edge: names.edge(image.edge),
                        reversed: image.end == End::B,
                    },
                )
            })
            .collect(),
    }
}

pub fn parse_involution(
    doc: &InvolutionDoc,
    g: &WeightedGraph,
    names: &Names,
) -> Result<Involution> {
    let mut vertex_map = BTreeMap::new();
    for (from, to) in &doc.vertices {
        let bad = |name: &str| Error::Document(format!("involution: unknown vertex {name:?}"));
        let f = names.vertex_id(from).ok_or_else(|| bad(from))?;
        let t = names.vertex_id(to).ok_or_else(|| bad(to))?;
        vertex_map.insert(f, t);
    }
    let mut half_map = BTreeMap::new();
    for (from, image) in &doc.edges {
        let bad = |name: &str| Error::Document(format!("involution: unknown edge {name:?}"));
        let f = names.edge_id(from).ok_or_else(|| bad(from))?;
        let t = names.edge_id(&image.edge).ok_or_else(|| bad(&image.edge))?;
        let (ta, tb) = if image.reversed {
            (End::B, End::A)
        } else {
            (End::A, End::B)
        };
        half_map.insert(HalfEdge::new(f, End::A), HalfEdge::new(t, ta));
        half_map.insert(HalfEdge::new(f, End::B), HalfEdge::new(t, tb));
    }
    let inv = Involution {
        vertex_map,
        half_map,
    };
    inv.validate(g)?;
    Ok(inv)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorModelDoc {
    /// Pattern vertex to the host vertices of its branch set.
    pub branch_sets: BTreeMap<String, Vec<String>>,
    /// Pattern edge to the host edge realizing it.
    pub edge_map: BTreeMap<String, String>,
}

pub fn minor_model_document(
    model: &MinorModel,
    pattern_names: &Names,
    host_names: &Names,
) -> MinorModelDoc {
    MinorModelDoc {
        branch_sets: model
            .branch_sets
            .iter()
            .map(|(p, set)| {
                (
                    pattern_names.vertex(*p),
                    set.iter().map(|&v| host_names.vertex(v)).collect(),
                )
            })
            .collect(),
        edge_map: model
            .edge_map
            .iter()
            .map(|(&p, &h)| (pattern_names.edge(p), host_names.edge(h)))
            .collect(),
    }
}

pub fn parse_minor_model(
    doc: &MinorModelDoc,
    pattern_names: &Names,
    host_names: &Names,
) -> Result<MinorModel> {
    let mut branch_sets = BTreeMap::new();
    for (p, set) in &doc.branch_sets {
        let pv = pattern_names
            .vertex_id(p)
            .ok_or_else(|| Error::Document(format!("minor model: unknown pattern vertex {p:?}")))?;
        let hs = set
            .iter()
            .map(|name| {
                host_names
                    .vertex_id(name)
                    .ok_or_else(|| Error::Document(format!("minor model: unknown host vertex {name:?}")))
            })
            .collect::<Result<_>>()?;
        branch_sets.insert(pv, hs);
    }
    let mut edge_map = BTreeMap::new();
    for (p, h) in &doc.edge_map {
        let pe = pattern_names
            .edge_id(p)
            .ok_or_else(|| Error::Document(format!("minor model: unknown pattern edge {p:?}")))?;
        let he = host_names
            .edge_id(h)
            .ok_or_else(|| Error::Document(format!("minor model: unknown host edge {h:?}")))?;
        edge_map.insert(pe, he);
    }
    Ok(MinorModel {
        branch_sets,
        edge_map,
    })
}

pub fn edge_map_document(
    map: &BTreeMap<EdgeId, EdgeId>,
    from: &Names,
    to: &Names,
) -> BTreeMap<String, String> {
    map.iter()
        .map(|(&a, &b)| (from.edge(a), to.edge(b)))
        .collect()
}

pub fn parse_edge_map(
    doc: &BTreeMap<String, String>,
    from: &Names,
    to: &Names,
) -> Result<BTreeMap<EdgeId, EdgeId>> {
    doc.iter()
        .map(|(a, b)| {
            let bad = |name: &str| Error::Document(format!("edge map: unknown edge {name:?}"));
            Ok((
                from.edge_id(a).ok_or_else(|| bad(a))?,
                to.edge_id(b).ok_or_else(|| bad(b))?,
            ))
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GramDoc {
    pub size: usize,
    pub rank: usize,
    pub determinant: String,
    pub entries: Vec<Vec<String>>,
    pub spanning_tree: Vec<String>,
    pub cycles: Vec<BTreeMap<String, i64>>,
    pub null_directions: usize,
}

pub fn gram_document(gm: &GramMatrix, names: &Names) -> GramDoc {
    GramDoc {
        size: gm.size,
        rank: gm.rank(),
        determinant: gm.determinant().to_string(),
        entries: gm
            .entries
            .iter()
            .map(|row| row.iter().map(|x| x.to_string()).collect())
            .collect(),
        spanning_tree: gm.tree.iter().map(|&e| names.edge(e)).collect(),
        cycles: gm
            .cycles
            .iter()
            .map(|c| c.iter().map(|(&e, &s)| (names.edge(e), s)).collect())
            .collect(),
        null_directions: gm.null_directions,
    }
}

/// The verdict document.  Negative answers carry the pattern name and the
/// minor model inside the stable model; positive answers carry the model
/// curve (canonical ids), its involution, and the witness mapping the input's
/// 3-edge connectivization onto the model's.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyptypeDoc {
    pub verdict: bool,
    pub genus: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<MinorModelDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<GraphDocument>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
}

pub fn hyptype_document(
    cert: &HyptypeCertificate,
    input: &TropicalCurve,
    names: &Names,
) -> HyptypeDoc {
    let mut doc = HyptypeDoc {
        verdict: cert.verdict,
        genus: input.genus(),
        pattern: None,
        minor: None,
        model: None,
        involution: None,
        witness: None,
    };
    if let Some(neg) = &cert.negative {
        let pattern_names = Names::canonical(&neg.pattern.graph());
        doc.pattern = Some(neg.pattern.name().to_string());
        doc.minor = Some(minor_model_document(&neg.model, &pattern_names, names));
    }
    if let Some(pos) = &cert.positive {
        let model_names = Names::canonical(pos.model.graph());
        doc.model = Some(graph_document(&pos.model, &model_names));
        doc.involution = Some(involution_document(
            &pos.involution,
            pos.model.graph(),
            &model_names,
        ));
        doc.witness = Some(edge_map_document(
            &pos.witness.edge_map,
            names,
            &model_names,
        ));
    }
    doc
}

/// Rebuilds a certificate from its document so it can be re-verified against
/// the input it was issued for.
pub fn parse_hyptype(
    doc: &HyptypeDoc,
    input: &TropicalCurve,
    names: &Names,
) -> Result<HyptypeCertificate> {
    let missing = |what: &str| Error::Document(format!("certificate: missing field {what:?}"));
    if doc.verdict {
        let model = parse_graph_document(doc.model.as_ref().ok_or_else(|| missing("model"))?)?;
        let involution = parse_involution(
            doc.involution.as_ref().ok_or_else(|| missing("involution"))?,
            model.curve.graph(),
            &model.names,
        )?;
        let witness = TwoIsomorphism {
            edge_map: parse_edge_map(
                doc.witness.as_ref().ok_or_else(|| missing("witness"))?,
                names,
                &model.names,
            )?,
        };
        Ok(HyptypeCertificate {
            verdict: true,
            negative: None,
            positive: Some(PositiveCertificate {
                model: model.curve,
                involution,
                witness,
            }),
        })
    } else {
        let pattern = match doc.pattern.as_deref() {
            Some("k4") => Forbidden::K4,
            Some("l3") => Forbidden::L3,
            other => {
                return Err(Error::Document(format!(
                    "certificate: unknown pattern {other:?}"
                )))
            }
        };
        let pattern_names = Names::canonical(&pattern.graph());
        let model = parse_minor_model(
            doc.minor.as_ref().ok_or_else(|| missing("minor"))?,
            &pattern_names,
            names,
        )?;
        let (stable, _) = input.stable_model()?;
        Ok(HyptypeCertificate {
            verdict: false,
            negative: Some(NegativeCertificate {
                pattern,
                host: stable.graph().clone(),
                model,
            }),
            positive: None,
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDoc {
    /// "weight", "bridge", or "cycle".
    pub kind: String,
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
    pub betti1: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalyzeDoc {
    pub genus: u32,
    pub betti1: u32,
    pub total_weight: u32,
    pub vertices: usize,
    pub edges: usize,
    pub stable: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d_invariant: Option<u32>,
    pub two_edge_connected: bool,
    pub blocks: Vec<BlockDoc>,
    pub separating_edges: Vec<String>,
    pub c1_sets: Vec<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectivizeDoc {
    pub level: u8,
    pub curve: GraphDocument,
    /// Level 3 only: each nonseparating input edge to its representative.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorDoc {
    pub pattern: String,
    pub found: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<MinorModelDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarDoc {
    pub vertices: Vec<String>,
    pub edges: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EarsDoc {
    /// The stage actually reached.
    pub stage: String,
    /// The curve the ears live on; alignment may rebuild it.
    pub curve: GraphDocument,
    pub ears: Vec<EarDoc>,
    pub initial: Vec<bool>,
    /// Equal-length constraints the involution imposes, as edge pairs.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<[String; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionDoc>,
    /// Present when the requested stage is unreachable; explains why.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub obstruction: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HyperellipticDoc {
    pub hyperelliptic: bool,
    pub stable: GraphDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub involution: Option<InvolutionDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quotient: Option<GraphDocument>,
    /// All isometric involutions of the stable model, on request.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub involutions: Vec<InvolutionDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FateDoc {
    /// "kept", "collapsed", or "deleted".
    pub fate: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientDoc {
    pub curve: GraphDocument,
    pub edge_fates: BTreeMap<String, FateDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompareDoc {
    pub isomorphic: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<BTreeMap<String, String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct JacobianDoc {
    pub genus: u32,
    pub determinant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gram: Option<GramDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub comparison: Option<CompareDoc>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepItemDoc {
    pub index: usize,
    pub source: String,
    pub genus: u32,
    pub edges: usize,
    pub verdict: bool,
    pub pipeline_ok: bool,
    pub torelli_ok: bool,
    pub agree: bool,
    /// Whether some metric on this graph is itself hyperelliptic; absent when
    /// the search was skipped or guarded.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub strongly: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub total: usize,
    pub agreements: usize,
    pub disagreements: Vec<usize>,
    /// Indices of hyperelliptic-type graphs admitting no hyperelliptic metric.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub type_but_not_strongly: Vec<usize>,
    pub items: Vec<SweepItemDoc>,
}
