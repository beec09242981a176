//! Python bindings. Rationals cross the boundary as `"p/q"` strings; any
//! object whose `str()` is such a literal (for example `fractions.Fraction`
//! or `int`) is accepted as input.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use expdist::verify::{run_case, CheckCase, CheckKind, Outcome};
use expdist::{
    aux_matrix_a, aux_matrix_b, cofsum_bi_block, det_bi_block, exponential_matrix, ingest_edge_list, inverse_bi_block,
    mu_vector, oracle_adjugate_sum, oracle_det, oracle_inverse, q_laplacian, random_bi_block, x_vector, Attachment,
    BiBlockGraph, BlockSpec, EdmBundle, Error, Rational, RationalMatrix, Side,
};

fn to_py(e: Error) -> PyErr {
    PyValueError::new_err(format!("{}: {e}", e.name()))
}

fn rational(obj: &Bound<'_, PyAny>) -> PyResult<Rational> {
    let text = obj.str()?.to_string();
    let q: Rational = text.parse().map_err(to_py)?;
    Ok(q)
}

fn side(text: &str) -> PyResult<Side> {
    match text {
        "X" | "x" => Ok(Side::X),
        "Y" | "y" => Ok(Side::Y),
        other => Err(PyValueError::new_err(format!("side must be 'X' or 'Y', got {other:?}"))),
    }
}

fn strings(m: &RationalMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(Rational::to_string).collect()).collect()
}

/// A bi-block graph in canonical vertex numbering.
#[pyclass(name = "Graph", frozen)]
pub struct PyGraph {
    inner: BiBlockGraph,
}

#[pymethods]
impl PyGraph {
    /// `blocks` is a list of `(m, n)`; `attachments` a list of
    /// `(cut_vertex, "X" | "Y")`, one per block after the first.
    #[new]
    #[pyo3(signature = (blocks, attachments = Vec::new()))]
    fn new(blocks: Vec<(usize, usize)>, attachments: Vec<(usize, String)>) -> PyResult<Self> {
        let blocks = blocks.into_iter().map(|(m, n)| BlockSpec::new(m, n)).collect();
        let attachments =
            attachments.into_iter().map(|(v, s)| Ok(Attachment::new(v, side(&s)?))).collect::<PyResult<Vec<_>>>()?;
        Ok(PyGraph { inner: BiBlockGraph::new(blocks, attachments).map_err(to_py)? })
    }

    #[staticmethod]
    fn complete_bipartite(m: usize, n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: BiBlockGraph::complete_bipartite(m, n).map_err(to_py)? })
    }

    #[staticmethod]
    fn path(n: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: BiBlockGraph::path(n).map_err(to_py)? })
    }

    #[staticmethod]
    fn random(seed: u64, r: usize, size_max: usize) -> PyResult<Self> {
        Ok(PyGraph { inner: random_bi_block(seed, r, size_max, size_max).map_err(to_py)? })
    }

    /// Recognises an edge list on vertices `0..=max id`. Returns the graph
    /// and `input_ids`, where `input_ids[canonical]` is the original id.
    #[staticmethod]
    fn from_edges(edges: Vec<(usize, usize)>) -> PyResult<(Self, Vec<usize>)> {
        let n = edges.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0);
        let r = ingest_edge_list(&edges, n).map_err(to_py)?;
        Ok((PyGraph { inner: r.graph }, r.input_ids))
    }

    #[getter]
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    #[getter]
    fn block_count(&self) -> usize {
        self.inner.block_count()
    }

    #[getter]
    fn blocks(&self) -> Vec<(usize, usize)> {
        self.inner.blocks().iter().map(|b| (b.m, b.n)).collect()
    }

    #[getter]
    fn attachments(&self) -> Vec<(usize, String)> {
        self.inner.attachments().iter().map(|a| (a.cut_vertex, a.side.to_string())).collect()
    }

    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges()
    }

    fn distance_matrix(&self) -> Vec<Vec<usize>> {
        self.inner.distances().to_vec()
    }

    fn is_tree(&self) -> bool {
        self.inner.is_tree()
    }

    fn __repr__(&self) -> String {
        format!("Graph(blocks={:?}, attachments={:?})", self.blocks(), self.attachments())
    }
}

/// `F` with entries `q^d(u,v)`.
#[pyfunction]
fn exponential(g: &PyGraph, q: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<String>>> {
    Ok(strings(&exponential_matrix(&g.inner, &rational(q)?).map_err(to_py)?))
}

/// Closed-form determinant of `F`.
#[pyfunction]
fn det(g: &PyGraph, q: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(det_bi_block(&g.inner, &rational(q)?).map_err(to_py)?.to_string())
}

/// Closed-form sum of all cofactors of `F`.
#[pyfunction]
fn cofsum(g: &PyGraph, q: &Bound<'_, PyAny>) -> PyResult<String> {
    Ok(cofsum_bi_block(&g.inner, &rational(q)?).map_err(to_py)?.to_string())
}

/// Closed-form inverse of `F`.
#[pyfunction]
fn inverse(g: &PyGraph, q: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<String>>> {
    let bundle = EdmBundle::build(&g.inner, &rational(q)?).map_err(to_py)?;
    Ok(strings(&inverse_bi_block(&bundle).map_err(to_py)?))
}

#[pyfunction]
fn qlaplacian(g: &PyGraph, q: &Bound<'_, PyAny>) -> PyResult<Vec<Vec<String>>> {
    Ok(strings(&q_laplacian(&g.inner, &rational(q)?).map_err(to_py)?))
}

/// Auxiliary objects `A`, `B`, `mu` and `x` as a dict.
#[pyfunction]
fn auxiliary<'py>(py: Python<'py>, g: &PyGraph, q: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let q = rational(q)?;
    let out = PyDict::new(py);
    out.set_item("A", strings(&aux_matrix_a(&g.inner, &q).map_err(to_py)?))?;
    out.set_item("B", strings(&aux_matrix_b(&g.inner, &q).map_err(to_py)?))?;
    let vec = |v: Vec<Rational>| v.iter().map(Rational::to_string).collect::<Vec<_>>();
    out.set_item("mu", vec(mu_vector(&g.inner, &q).map_err(to_py)?))?;
    out.set_item("x", vec(x_vector(&g.inner, &q).map_err(to_py)?))?;
    Ok(out)
}

/// Brute-force determinant, inverse (or `None` if singular) and cofactor
/// sum of `F`.
#[pyfunction]
fn oracle<'py>(py: Python<'py>, g: &PyGraph, q: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let f = exponential_matrix(&g.inner, &rational(q)?).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("det", oracle_det(&f).map_err(to_py)?.to_string())?;
    out.set_item("inverse", oracle_inverse(&f).ok().map(|m| strings(&m)))?;
    out.set_item("cofsum", oracle_adjugate_sum(&f).map_err(to_py)?.to_string())?;
    Ok(out)
}

/// Runs every check on `(g, q)`; maps check name to `"pass"`, `"skipped"`
/// or `"fail: <witness>"`.
#[pyfunction]
fn verify<'py>(py: Python<'py>, g: &PyGraph, q: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyDict>> {
    let case = CheckCase::new(g.inner.clone(), rational(q)?, CheckKind::all()).map_err(to_py)?;
    let report = py.detach(|| run_case(&case));
    let out = PyDict::new(py);
    for rec in &report.records {
        let status = match &rec.outcome {
            Outcome::Fail(w) => format!("fail: {w}"),
            other => other.status().to_string(),
        };
        out.set_item(rec.kind.name(), status)?;
    }
    Ok(out)
}

#[pymodule]
fn pyexpdist(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_function(wrap_pyfunction!(exponential, m)?)?;
    m.add_function(wrap_pyfunction!(det, m)?)?;
    m.add_function(wrap_pyfunction!(cofsum, m)?)?;
    m.add_function(wrap_pyfunction!(inverse, m)?)?;
    m.add_function(wrap_pyfunction!(qlaplacian, m)?)?;
    m.add_function(wrap_pyfunction!(auxiliary, m)?)?;
    m.add_function(wrap_pyfunction!(oracle, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
