//! Python bindings: a `Curve` class wrapping a tropical curve together with
//! its user-facing names, plus the decision and comparison entry points.
//! Structured results cross the boundary as the same JSON the CLI emits.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use hyptype::decision::{
    cross_validate, is_hyperelliptic_type, jacobian_gram, jacobians_isomorphic,
    strongly_hyperelliptic_type,
};
use hyptype::hyperelliptic::is_hyperelliptic;
use hyptype::io::{self, Names};
use hyptype::minors::find_minor_model;
use hyptype::{Error, TropicalCurve};

fn pyerr(e: Error) -> PyErr {
    match e {
        Error::SizeGuard { .. } | Error::EarPipeline(_) | Error::Verification(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        other => PyValueError::new_err(other.to_string()),
    }
}

/// A tropical curve: a connected vertex-weighted multigraph with positive
/// rational edge lengths, parsed from the JSON document format.
#[pyclass(name = "Curve", frozen)]
struct PyCurve {
    curve: TropicalCurve,
    names: Names,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        let parsed = io::parse_graph(text).map_err(pyerr)?;
        Ok(PyCurve {
            curve: parsed.curve,
            names: parsed.names,
        })
    }

    /// A random stable curve of the given genus (seeded, deterministic).
    #[staticmethod]
    #[pyo3(signature = (seed, genus=3, max_edges=10))]
    fn random(seed: u64, genus: u32, max_edges: usize) -> PyResult<Self> {
        let curve = hyptype::gen::random_stable_curve(seed, genus, max_edges).map_err(pyerr)?;
        let names = Names::canonical(curve.graph());
        Ok(PyCurve { curve, names })
    }

    #[getter]
    fn genus(&self) -> u32 {
        self.curve.genus()
    }

    #[getter]
    fn betti1(&self) -> u32 {
        self.curve.graph().betti1()
    }

    #[getter]
    fn total_weight(&self) -> u32 {
        self.curve.graph().total_weight()
    }

    #[getter]
    fn num_vertices(&self) -> usize {
        self.curve.graph().n_vertices()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.curve.graph().n_edges()
    }

    fn is_stable(&self) -> bool {
        self.curve.is_stable()
    }

    /// Sum of val(v) + 3w(v) - 3 over the vertices; `None` when unstable.
    fn d_invariant(&self) -> Option<u32> {
        self.curve.graph().d_invariant().ok()
    }

    fn to_json(&self) -> String {
        io::to_json(&io::graph_document(&self.curve, &self.names))
    }

    fn stable_model(&self) -> PyResult<Self> {
        let (stable, _) = self.curve.stable_model().map_err(pyerr)?;
        let names = self.names.clone();
        Ok(PyCurve { curve: stable, names })
    }

    /// The 2- or 3-edge connectivization; surviving edges keep their names.
    #[pyo3(signature = (level=3))]
    fn connectivize(&self, level: u8) -> PyResult<Self> {
        let curve = match level {
            2 => {
                hyptype::connectivity::two_edge_connectivization(&self.curve)
                    .map_err(pyerr)?
                    .0
            }
            3 => {
                hyptype::connectivity::three_edge_connectivization(&self.curve)
                    .map_err(pyerr)?
                    .curve
            }
            other => {
                return Err(PyValueError::new_err(format!(
                    "level must be 2 or 3, got {other}"
                )))
            }
        };
        let names = self.names.clone();
        Ok(PyCurve { curve, names })
    }

    /// Whether the curve is of hyperelliptic type.
    fn hyperelliptic_type(&self) -> PyResult<bool> {
        Ok(is_hyperelliptic_type(&self.curve).map_err(pyerr)?.verdict)
    }

    /// The full verdict with its evidence, re-verified, as JSON: either a
    /// forbidden-minor model or a model curve with involution and witness.
    fn hyperelliptic_certificate(&self) -> PyResult<String> {
        let cert = is_hyperelliptic_type(&self.curve).map_err(pyerr)?;
        cert.verify(&self.curve).map_err(pyerr)?;
        Ok(io::to_json(&io::hyptype_document(
            &cert,
            &self.curve,
            &self.names,
        )))
    }

    /// Whether some choice of edge lengths on this graph is hyperelliptic.
    fn strongly_hyperelliptic(&self) -> PyResult<bool> {
        Ok(strongly_hyperelliptic_type(self.curve.graph())
            .map_err(pyerr)?
            .is_some())
    }

    /// Whether this metric curve itself is hyperelliptic.
    fn is_hyperelliptic(&self) -> PyResult<bool> {
        Ok(is_hyperelliptic(&self.curve).map_err(pyerr)?.is_some())
    }

    /// Determinant of the length pairing on the cycle space, as a rational
    /// in lowest terms.
    fn jacobian_determinant(&self) -> PyResult<String> {
        Ok(jacobian_gram(&self.curve)
            .map_err(pyerr)?
            .determinant()
            .to_string())
    }

    /// The Gram matrix of the Jacobian as JSON (entries, basis, rank).
    fn jacobian_gram(&self) -> PyResult<String> {
        let gram = jacobian_gram(&self.curve).map_err(pyerr)?;
        Ok(io::to_json(&io::gram_document(&gram, &self.names)))
    }

    fn jacobians_isomorphic(&self, other: PyRef<'_, PyCurve>) -> PyResult<bool> {
        Ok(jacobians_isomorphic(&self.curve, &other.curve)
            .map_err(pyerr)?
            .is_some())
    }

    fn has_minor(&self, pattern: PyRef<'_, PyCurve>) -> PyResult<bool> {
        Ok(
            find_minor_model(self.curve.graph(), pattern.curve.graph())
                .map_err(pyerr)?
                .is_some(),
        )
    }

    /// A verified minor model of `pattern` inside this curve, as JSON, or
    /// `None` when the pattern is not a minor.
    fn minor_model(&self, pattern: PyRef<'_, PyCurve>) -> PyResult<Option<String>> {
        let found = find_minor_model(self.curve.graph(), pattern.curve.graph()).map_err(pyerr)?;
        Ok(found.map(|model| {
            io::to_json(&io::minor_model_document(
                &model,
                &pattern.names,
                &self.names,
            ))
        }))
    }

    /// (verdict, pipeline_ok, torelli_ok): the minor-based verdict, whether
    /// the model pipeline produced a verified certificate, and whether the
    /// model's Jacobian matches the input's.
    fn cross_validate(&self) -> PyResult<(bool, bool, bool)> {
        let cv = cross_validate(&self.curve).map_err(pyerr)?;
        Ok((cv.verdict, cv.pipeline_ok, cv.torelli_ok))
    }

    fn __repr__(&self) -> String {
        format!(
            "Curve(genus={}, vertices={}, edges={})",
            self.curve.genus(),
            self.curve.graph().n_vertices(),
            self.curve.graph().n_edges()
        )
    }
}

#[pymodule]
fn hyptype_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCurve>()?;
    Ok(())
}
