//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyModule;

use qgraph::graph::MetricGraph;
use qgraph::morse::{domain_report, representative};
use qgraph::partition::{minimal_partition_general, EnergyKind};
use qgraph::spectral::{eigenvalues, locate_index, sample_csv, BoundaryCondition};
use qgraph::verify::{self, Suite, VerifyOptions};
use qgraph::zoo::{self, Lcg};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn runtime_err(e: impl std::fmt::Display) -> PyErr {
    PyRuntimeError::new_err(e.to_string())
}

fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(runtime_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A compact metric graph with standard vertex conditions.
#[pyclass(name = "Graph", module = "pyqgraph", frozen)]
struct PyGraph {
    inner: MetricGraph,
}

#[pymethods]
impl PyGraph {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyGraph { inner: MetricGraph::from_json(text).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (length = 1.0))]
    fn path(length: f64) -> PyResult<Self> {
        Ok(PyGraph { inner: zoo::path(length).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (lengths = (1.0, 1.0, 1.0)))]
    fn star3(lengths: (f64, f64, f64)) -> PyResult<Self> {
        Ok(PyGraph { inner: zoo::star3([lengths.0, lengths.1, lengths.2]).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (loop_length = 2.0 * std::f64::consts::PI, tail_length = 2.0 * std::f64::consts::PI))]
    fn tadpole(loop_length: f64, tail_length: f64) -> PyResult<Self> {
        Ok(PyGraph { inner: zoo::tadpole(loop_length, tail_length).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (edges, seed = 7))]
    fn random_tree(edges: usize, seed: u64) -> PyResult<Self> {
        Ok(PyGraph { inner: zoo::random_tree(edges, &mut Lcg::new(seed)).map_err(value_err)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner.to_spec()).map_err(runtime_err)
    }

    #[getter]
    fn betti_number(&self) -> usize {
        self.inner.betti_number()
    }

    #[getter]
    fn total_length(&self) -> f64 {
        self.inner.total_length()
    }

    /// Distinct eigenvalues covering the first `count` indices, as `(mu, multiplicity)`.
    #[pyo3(signature = (count, dirichlet = None))]
    fn eigenvalues(&self, count: usize, dirichlet: Option<Vec<String>>) -> PyResult<Vec<(f64, usize)>> {
        let bc = match dirichlet {
            Some(ids) if !ids.is_empty() => BoundaryCondition::dirichlet(ids),
            _ => BoundaryCondition::Standard,
        };
        let pairs = eigenvalues(&self.inner, &bc, count).map_err(runtime_err)?;
        Ok(pairs.iter().map(|p| (p.mu, p.multiplicity)).collect())
    }

    /// Nodal and Neumann structure of the `index`-th eigenfunction.
    fn domain_report<'py>(&self, py: Python<'py>, index: usize) -> PyResult<Bound<'py, PyAny>> {
        if index == 0 {
            return Err(value_err("index must be at least 1"));
        }
        let pairs = eigenvalues(&self.inner, &BoundaryCondition::Standard, index).map_err(runtime_err)?;
        let (grp, _) = locate_index(&pairs, index).ok_or_else(|| runtime_err("index beyond computed range"))?;
        let f = representative(&self.inner, &pairs, index).ok_or_else(|| runtime_err("no eigenfunction"))?;
        let r = domain_report(&self.inner, &f, pairs[grp].multiplicity).map_err(runtime_err)?;
        to_py(py, &r)
    }

    /// CSV samples `edge_id,x,value,derivative` of the `index`-th eigenfunction.
    #[pyo3(signature = (index, samples = 101))]
    fn eigenfunction_csv(&self, index: usize, samples: usize) -> PyResult<String> {
        let pairs = eigenvalues(&self.inner, &BoundaryCondition::Standard, index.max(1)).map_err(runtime_err)?;
        let f = representative(&self.inner, &pairs, index).ok_or_else(|| value_err("index must be at least 1"))?;
        Ok(sample_csv(&self.inner, &f, samples))
    }

    /// Spectral minimal `k`-partition with `kind` either "neumann" or "dirichlet".
    #[pyo3(signature = (k, kind = "neumann"))]
    fn minimal_partition<'py>(&self, py: Python<'py>, k: usize, kind: &str) -> PyResult<Bound<'py, PyAny>> {
        let kind = match kind {
            "neumann" => EnergyKind::Neumann,
            "dirichlet" => EnergyKind::Dirichlet,
            other => return Err(value_err(format!("unknown energy kind `{other}`"))),
        };
        let r = py.detach(|| minimal_partition_general(&self.inner, k, kind)).map_err(runtime_err)?;
        to_py(py, &r.to_output())
    }

    fn __repr__(&self) -> String {
        format!("Graph(vertices={}, edges={}, beta={})", self.inner.vertex_count(), self.inner.edge_count(), self.inner.betti_number())
    }
}

/// Run a verification suite on the given graphs; returns the report as a dict.
#[pyfunction]
#[pyo3(signature = (suite, graphs, n_max = 6, seed = 7))]
fn verify_suite<'py>(py: Python<'py>, suite: &str, graphs: Vec<Bound<'py, PyGraph>>, n_max: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let suite = Suite::parse(suite).ok_or_else(|| value_err(format!("unknown suite `{suite}`")))?;
    let named: Vec<_> = graphs.iter().enumerate().map(|(i, g)| (format!("g{i}"), g.get().inner.clone())).collect();
    let opts = VerifyOptions { n_max, seed, ..VerifyOptions::default() };
    let report = py.detach(|| verify::run(suite, &named, &opts));
    to_py(py, &report)
}

#[pymodule]
fn pyqgraph(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(verify_suite, m)?)?;
    Ok(())
}
