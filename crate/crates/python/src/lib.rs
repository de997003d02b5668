//! Python bindings: graphs, α, ϑ, the two-point transform, orthogonal
//! representations, exact statistics, simulation and certification.

use std::collections::BTreeMap;

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;

use twopoint::certify::{self, CertifyOptions};
use twopoint::events::{build_two_point_graph, LabelRecord};
use twopoint::experiment::{run_experiment, NoiseModel};
use twopoint::io;
use twopoint::orthorep::{extract_ortho_rep, verify_ortho_rep, CVector};
use twopoint::quantum::{ExactStatistics, QState, Scheme};
use twopoint::theta::{self, SdpSolution};
use twopoint::{alpha, catalog, Error};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::Dimension { .. }
        | Error::UnknownCatalog { .. } => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_scheme(name: &str) -> PyResult<Scheme> {
    match name {
        "projective" => Ok(Scheme::Projective),
        "demolition" | "demolition_reprepare" => Ok(Scheme::DemolitionReprepare),
        _ => Err(PyValueError::new_err(format!(
            "unknown scheme {name:?}; expected \"projective\" or \"demolition\""
        ))),
    }
}

/// Simple undirected graph with optional positive integer vertex weights.
#[pyclass(name = "Graph", module = "pytwopoint", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: twopoint::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    #[pyo3(signature = (n, edges, weights=None))]
    fn new(n: usize, edges: Vec<(usize, usize)>, weights: Option<BTreeMap<usize, u32>>) -> PyResult<Self> {
        let g = twopoint::Graph::unweighted(n, edges).map_err(py_err)?;
        let inner = match weights {
            Some(w) => g.with_weights(&w).map_err(py_err)?,
            None => g,
        };
        Ok(PyGraph { inner })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: io::parse_graph_json(text).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_dimacs(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: io::parse_graph_dimacs(text).map_err(py_err)?,
        })
    }

    /// Named graph from the built-in catalog, e.g. `"c5"` or `"petersen"`.
    #[staticmethod]
    fn catalog(name: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: catalog::catalog(name).map_err(py_err)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn weights(&self) -> Option<Vec<u32>> {
        self.inner.weights().map(<[u32]>::to_vec)
    }

    fn has_edge(&self, a: usize, b: usize) -> bool {
        self.inner.has_edge(a, b)
    }

    fn neighbors(&self, v: usize) -> PyResult<Vec<usize>> {
        if v >= self.inner.n() {
            return Err(PyValueError::new_err(format!("vertex {v} out of range")));
        }
        Ok(self.inner.neighbors(v).to_vec())
    }

    fn complement(&self) -> Self {
        PyGraph {
            inner: self.inner.complement(),
        }
    }

    fn to_json(&self) -> PyResult<String> {
        io::graph_to_json(&self.inner).map_err(py_err)
    }

    fn to_dimacs(&self) -> String {
        io::graph_to_dimacs(&self.inner)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!(
            "Graph(n={}, edges={}{})",
            self.inner.n(),
            self.inner.edge_count(),
            if self.inner.is_weighted() { ", weighted" } else { "" }
        )
    }
}

/// Optimum of the Lovász ϑ program.
#[pyclass(name = "ThetaResult", module = "pytwopoint", frozen)]
struct PyTheta {
    sol: SdpSolution,
    graph: twopoint::Graph,
}

#[pymethods]
impl PyTheta {
    #[getter]
    fn value(&self) -> f64 {
        self.sol.primal_value
    }

    #[getter]
    fn dual_bound(&self) -> f64 {
        self.sol.dual_value
    }

    #[getter]
    fn gap(&self) -> f64 {
        self.sol.gap()
    }

    #[getter]
    fn status(&self) -> String {
        format!("{:?}", self.sol.status)
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.sol.iterations
    }

    #[getter]
    fn tolerance(&self) -> f64 {
        self.sol.tolerance
    }

    /// The optimal Gram matrix, as a list of rows.
    #[getter]
    fn x(&self) -> Vec<Vec<f64>> {
        io::matrix_rows(&self.sol.x)
    }

    fn feasible(&self) -> PyResult<bool> {
        let report = theta::verify_feasibility(&self.graph, &self.sol.x, self.sol.tolerance).map_err(py_err)?;
        Ok(report.passed())
    }

    fn __float__(&self) -> f64 {
        self.sol.primal_value
    }

    fn __repr__(&self) -> String {
        format!("ThetaResult(value={}, status={:?})", self.sol.primal_value, self.sol.status)
    }
}

/// Exclusivity graph of two-point events together with the event labels.
#[pyclass(name = "EventGraph", module = "pytwopoint", frozen)]
struct PyEventGraph {
    inner: twopoint::EventGraph,
}

#[pymethods]
impl PyEventGraph {
    #[getter]
    fn graph(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.graph().clone(),
        }
    }

    #[getter]
    fn source(&self) -> PyGraph {
        PyGraph {
            inner: self.inner.source().clone(),
        }
    }

    /// `(kind, observables, outcomes)` per vertex.
    #[getter]
    fn labels(&self) -> Vec<(String, Vec<usize>, Vec<u32>)> {
        self.inner
            .labels()
            .iter()
            .map(|l| {
                let r = LabelRecord::from(l);
                (r.kind, r.obs, r.out.into_iter().map(u32::from).collect())
            })
            .collect()
    }

    fn to_json(&self) -> PyResult<String> {
        io::event_graph_to_json(&self.inner).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "EventGraph(n={}, edges={})",
            self.inner.graph().n(),
            self.inner.graph().edge_count()
        )
    }
}

/// Unit vectors per vertex (adjacent ones orthogonal) and a handle ψ.
#[pyclass(name = "OrthoRep", module = "pytwopoint", frozen)]
struct PyOrthoRep {
    inner: twopoint::OrthoRep,
}

#[pymethods]
impl PyOrthoRep {
    #[new]
    fn new(psi: Vec<Complex64>, vectors: Vec<Vec<Complex64>>) -> PyResult<Self> {
        let psi = CVector::from_vec(psi);
        let vectors = vectors.into_iter().map(CVector::from_vec).collect();
        Ok(PyOrthoRep {
            inner: twopoint::OrthoRep::new(psi, vectors).map_err(py_err)?,
        })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyOrthoRep {
            inner: io::parse_ortho_rep_json(text).map_err(py_err)?,
        })
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn psi(&self) -> Vec<Complex64> {
        self.inner.psi().iter().copied().collect()
    }

    #[getter]
    fn vectors(&self) -> Vec<Vec<Complex64>> {
        self.inner.vectors().iter().map(|v| v.iter().copied().collect()).collect()
    }

    /// `|⟨ψ|v_i⟩|²` per vertex.
    fn overlaps(&self) -> Vec<f64> {
        self.inner.overlaps()
    }

    fn overlap_sum(&self) -> f64 {
        self.inner.overlap_sum()
    }

    /// Checks orthogonality, norms and the overlap sum against `target`.
    fn verify(&self, graph: &PyGraph, target: f64, tolerance: f64) -> PyResult<bool> {
        let report = verify_ortho_rep(&graph.inner, &self.inner, target, tolerance).map_err(py_err)?;
        Ok(report.passed())
    }

    fn to_json(&self) -> PyResult<String> {
        io::ortho_rep_to_json(&self.inner).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("OrthoRep(vertices={}, d={})", self.inner.len(), self.inner.dimension())
    }
}

/// Returns `(alpha, witness)`.
#[pyfunction(name = "alpha")]
fn py_alpha(graph: &PyGraph) -> PyResult<(usize, Vec<usize>)> {
    let r = alpha::independence_number(&graph.inner).map_err(py_err)?;
    Ok((r.alpha, r.witness))
}

#[pyfunction(name = "theta")]
#[pyo3(signature = (graph, tolerance=theta::DEFAULT_TOLERANCE))]
fn py_theta(py: Python<'_>, graph: &PyGraph, tolerance: f64) -> PyResult<PyTheta> {
    let g = graph.inner.clone();
    let sol = py.detach(|| theta::theta(&g, tolerance)).map_err(py_err)?;
    Ok(PyTheta { sol, graph: g })
}

#[pyfunction]
fn transform(graph: &PyGraph) -> PyResult<PyEventGraph> {
    Ok(PyEventGraph {
        inner: build_two_point_graph(&graph.inner).map_err(py_err)?,
    })
}

/// Representation saturating ϑ(G), extracted from the ϑ optimum.
#[pyfunction]
#[pyo3(signature = (graph, tolerance=theta::DEFAULT_TOLERANCE))]
fn orthorep(py: Python<'_>, graph: &PyGraph, tolerance: f64) -> PyResult<PyOrthoRep> {
    let g = graph.inner.clone();
    let inner = py
        .detach(|| {
            let sol = theta::theta(&g, tolerance)?;
            extract_ortho_rep(&g, &sol, tolerance)
        })
        .map_err(py_err)?;
    Ok(PyOrthoRep { inner })
}

/// Exact `(S, S')` for the pure state ψ of `rep`.
#[pyfunction]
#[pyo3(signature = (graph, rep, scheme="projective"))]
fn exact_s(graph: &PyGraph, rep: &PyOrthoRep, scheme: &str) -> PyResult<(f64, f64)> {
    let scheme = parse_scheme(scheme)?;
    let g = &graph.inner;
    let state = QState::pure(rep.inner.psi()).map_err(py_err)?;
    let stats = ExactStatistics::compute(g, &rep.inner, &state, scheme).map_err(py_err)?;
    Ok((stats.s(g).map_err(py_err)?, stats.s_prime(g).map_err(py_err)?))
}

/// Monte Carlo run; returns the experiment record as a dict.
#[pyfunction]
#[pyo3(signature = (
    graph, rep=None, shots=100_000, seed=0, scheme="projective",
    depolarizing=0.0, misalignment=0.0, flip=0.0, tolerance=theta::DEFAULT_TOLERANCE
))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    rep: Option<&PyOrthoRep>,
    shots: u64,
    seed: u64,
    scheme: &str,
    depolarizing: f64,
    misalignment: f64,
    flip: f64,
    tolerance: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let scheme = parse_scheme(scheme)?;
    let noise = NoiseModel {
        depolarizing_p: depolarizing,
        vector_misalignment_angle: misalignment,
        outcome_flip_p: flip,
    };
    let g = graph.inner.clone();
    let given = rep.map(|r| r.inner.clone());
    let text = py
        .detach(|| {
            let rep = match given {
                Some(r) => r,
                None => extract_ortho_rep(&g, &theta::theta(&g, tolerance)?, tolerance)?,
            };
            let record = run_experiment(&rep, &g, shots, seed, noise, scheme)?;
            io::to_json_string(&record)
        })
        .map_err(py_err)?;
    json_to_py(py, &text)
}

/// Full certification; returns `(passed, report)` with the report as a dict.
/// A run that stops early raises with the partial report attached as
/// `args[1]`.
#[pyfunction(name = "certify")]
#[pyo3(signature = (
    graph, tolerance=theta::DEFAULT_TOLERANCE, shots=100_000, seed=0, scheme="projective",
    skip_montecarlo=false, depolarizing=0.0, misalignment=0.0, flip=0.0
))]
#[allow(clippy::too_many_arguments)]
fn py_certify<'py>(
    py: Python<'py>,
    graph: &PyGraph,
    tolerance: f64,
    shots: u64,
    seed: u64,
    scheme: &str,
    skip_montecarlo: bool,
    depolarizing: f64,
    misalignment: f64,
    flip: f64,
) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let opts = CertifyOptions {
        tolerance,
        shots,
        seed,
        scheme: parse_scheme(scheme)?,
        skip_montecarlo,
        noise: NoiseModel {
            depolarizing_p: depolarizing,
            vector_misalignment_angle: misalignment,
            outcome_flip_p: flip,
        },
        ..CertifyOptions::default()
    };
    let g = graph.inner.clone();
    let report = py.detach(|| certify::certify(&g, &opts));
    let text = io::to_json_string(&report.to_value()).map_err(py_err)?;
    let dict = json_to_py(py, &text)?;
    if let Some(e) = report.error() {
        let err = py_err(e);
        err.value(py).setattr("args", (err.value(py).str()?, dict))?;
        return Err(err);
    }
    Ok((report.passed(), dict))
}

#[pymodule]
fn pytwopoint(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyTheta>()?;
    m.add_class::<PyEventGraph>()?;
    m.add_class::<PyOrthoRep>()?;
    m.add_function(wrap_pyfunction!(py_alpha, m)?)?;
    m.add_function(wrap_pyfunction!(py_theta, m)?)?;
    m.add_function(wrap_pyfunction!(transform, m)?)?;
    m.add_function(wrap_pyfunction!(orthorep, m)?)?;
    m.add_function(wrap_pyfunction!(exact_s, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(py_certify, m)?)?;
    m.add("DEFAULT_TOLERANCE", theta::DEFAULT_TOLERANCE)?;
    Ok(())
}
