//! Python bindings: matrices, functions on `Z_n`, loop-graphs and
//! apportionment reports, plus the main operations on them. Long searches
//! release the GIL.

use pyo3::exceptions::{PyArithmeticError, PyIndexError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use apportion::blowup::{apportion_blowup_restricted, cyclic_blowup, frak_u_min, tf_matrix, GroupSearch};
use apportion::certify::{
    certify_with_margin, psd_apportionability_with_tol, u_bounds, PSD_RANK_TOL, VIOLATION_MARGIN,
};
use apportion::interlace::{check_sum_identity, interlacing_bounds, mask_family};
use apportion::io::{matrix_from_str, matrix_to_string};
use apportion::labelings::{all_contracting, is_graceful, loopgraph_to_nif, nif_to_loopgraph, LoopGraph, ZnFunction};
use apportion::linalg::{dft, dft_multiplicities, is_uniform, norms, DEFAULT_UNIFORM_TOL};
use apportion::rank_one::apportion_rank_one;
use apportion::recovery::{edge_labeling_factors, recover_function, recover_graph, FactorMultiset, LinearForm};
use apportion::search::{search_gl, search_unitary, uar_estimate, SearchOptions};
use apportion::{ApportionReport, CMatrix, Status, C64};

fn err(e: apportion::Error) -> PyErr {
    match e {
        apportion::Error::Numeric(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Square complex matrix, built from a list of rows.
#[pyclass(name = "Matrix", frozen, from_py_object)]
#[derive(Clone)]
struct PyMatrix(CMatrix);

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: Vec<Vec<C64>>) -> PyResult<Self> {
        CMatrix::from_rows(&rows).map(Self).map_err(err)
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        Self(CMatrix::identity(n))
    }

    #[staticmethod]
    fn ones(n: usize) -> Self {
        Self(CMatrix::ones(n))
    }

    /// Unitary DFT matrix with `ω = e^{2πi/n}`.
    #[staticmethod]
    fn dft(n: usize) -> Self {
        Self(dft(n))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        matrix_from_str(text).map(Self).map_err(err)
    }

    fn to_json(&self) -> String {
        matrix_to_string(&self.0)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn rows(&self) -> Vec<Vec<C64>> {
        (0..self.0.n()).map(|k| self.0.row(k).to_vec()).collect()
    }

    fn __getitem__(&self, idx: (usize, usize)) -> PyResult<C64> {
        let n = self.0.n();
        if idx.0 >= n || idx.1 >= n {
            return Err(PyIndexError::new_err(format!("index {idx:?} out of range for n = {n}")));
        }
        Ok(self.0[idx])
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        if self.0.n() != other.0.n() {
            return Err(PyValueError::new_err("matrix sizes differ"));
        }
        Ok(Self(&self.0 * &other.0))
    }

    fn __repr__(&self) -> String {
        format!("Matrix(n={})", self.0.n())
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inverse().map(Self).map_err(err)
    }

    /// `self · a · self*`.
    fn conjugate(&self, a: &Self) -> PyResult<Self> {
        if self.0.n() != a.0.n() {
            return Err(PyValueError::new_err("matrix sizes differ"));
        }
        Ok(Self(self.0.conjugate(&a.0)))
    }

    fn frobenius(&self) -> f64 {
        self.0.frobenius()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn max_diff(&self, other: &Self) -> f64 {
        self.0.max_diff(&other.0)
    }

    /// `(flag, c)`: whether every entry magnitude is within `tol` of `c`.
    #[pyo3(signature = (tol = DEFAULT_UNIFORM_TOL))]
    fn is_uniform(&self, tol: f64) -> (bool, f64) {
        is_uniform(&self.0, tol)
    }

    #[pyo3(signature = (tol = 1e-10))]
    fn is_unitary(&self, tol: f64) -> bool {
        self.0.is_unitary(tol)
    }
}

/// A function `Z_n → Z_n` given by its value table.
#[pyclass(name = "Function", frozen, from_py_object)]
#[derive(Clone)]
struct PyFunction(ZnFunction);

#[pymethods]
impl PyFunction {
    #[new]
    fn new(table: Vec<usize>) -> PyResult<Self> {
        ZnFunction::new(table).map(Self).map_err(err)
    }

    /// Every contracting function on `Z_n`.
    #[staticmethod]
    fn all_contracting(n: usize) -> Vec<Self> {
        all_contracting(n).into_iter().map(Self).collect()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn table(&self) -> Vec<usize> {
        self.0.table().to_vec()
    }

    fn is_contracting(&self) -> bool {
        self.0.is_contracting()
    }

    /// `self ∘ g`.
    fn compose(&self, g: &Self) -> PyResult<Self> {
        self.0.compose(&g.0).map(Self).map_err(err)
    }

    /// The graceful loop-graph of a non-increasing function.
    fn loopgraph(&self) -> PyResult<PyGraph> {
        nif_to_loopgraph(&self.0).map(PyGraph).map_err(err)
    }

    /// Blowup matrix `T_f`.
    fn tf(&self) -> PyResult<PyMatrix> {
        tf_matrix(&self.0).map(PyMatrix).map_err(err)
    }

    /// Coefficient vectors of the linear factors of the edge-labeling polynomial.
    fn edge_factors(&self) -> Vec<Vec<i64>> {
        edge_labeling_factors(&self.0).forms.iter().map(|f| f.coeffs().to_vec()).collect()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("Function({:?})", self.0.table())
    }
}

/// Graph on `0..n` with unordered edges; loops allowed.
#[pyclass(name = "Graph", frozen, from_py_object)]
#[derive(Clone)]
struct PyGraph(LoopGraph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        LoopGraph::new(n, &edges).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().collect()
    }

    fn is_graceful(&self) -> PyResult<bool> {
        is_graceful(&self.0).map_err(err)
    }

    /// Cyclic blowup matrix, of size `(2n−1)²`.
    fn blowup(&self) -> PyResult<PyMatrix> {
        cyclic_blowup(&self.0, self.0.n()).map(PyMatrix).map_err(err)
    }

    /// Inverse of `Function.loopgraph`.
    fn to_function(&self) -> PyResult<PyFunction> {
        loopgraph_to_nif(&self.0).map(PyFunction).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={:?})", self.0.n(), self.0.edges().collect::<Vec<_>>())
    }
}

/// Outcome of an apportionment: `result = transform · A · transform⁻¹`.
#[pyclass(name = "Report", frozen)]
struct PyReport(ApportionReport);

#[pymethods]
impl PyReport {
    /// `"uniform"`, `"inconclusive"` or `"infeasible-by-theorem"`.
    #[getter]
    fn status(&self) -> &'static str {
        match self.0.status {
            Status::Uniform => "uniform",
            Status::Inconclusive => "inconclusive",
            Status::InfeasibleByTheorem => "infeasible-by-theorem",
        }
    }

    #[getter]
    fn transform(&self) -> PyMatrix {
        PyMatrix(self.0.transform.clone())
    }

    #[getter]
    fn result(&self) -> PyMatrix {
        PyMatrix(self.0.result.clone())
    }

    #[getter]
    fn kappa(&self) -> f64 {
        self.0.kappa
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.0.residual
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.0.iterations
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed
    }

    #[getter]
    fn theorem(&self) -> Option<String> {
        self.0.theorem.clone()
    }

    fn __repr__(&self) -> String {
        format!("Report(status={:?}, kappa={}, residual={:e})", self.status(), self.0.kappa, self.0.residual)
    }
}

/// Norms and the bounds `‖A‖_F/n ≤ u(A) ≤ ‖A‖_2`.
#[pyfunction]
fn matrix_norms<'py>(py: Python<'py>, a: &PyMatrix) -> PyResult<Bound<'py, PyDict>> {
    let r = norms(&a.0);
    let b = u_bounds(&a.0);
    let d = PyDict::new(py);
    d.set_item("max", r.max)?;
    d.set_item("frobenius", r.frobenius)?;
    d.set_item("spectral", r.spectral)?;
    d.set_item("nuclear", r.nuclear)?;
    d.set_item("u_lower", b.lower)?;
    d.set_item("u_upper", b.upper)?;
    d.set_item("u_upper_normal", b.normal_upper)?;
    Ok(d)
}

#[pyfunction(name = "apportion_rank_one")]
fn py_apportion_rank_one(a: &PyMatrix) -> PyResult<PyReport> {
    apportion_rank_one(&a.0).map(PyReport).map_err(err)
}

/// `(certified, c, |c|, bound)`; `certified` false means nothing was found.
#[pyfunction]
#[pyo3(signature = (a, margin = VIOLATION_MARGIN))]
fn certify(a: &PyMatrix, margin: f64) -> PyResult<(bool, C64, f64, f64)> {
    let c = certify_with_margin(&a.0, margin).map_err(err)?;
    Ok((c.is_certificate(), c.witness_c, c.lhs, c.rhs))
}

/// `(rank, unitarily_apportionable, eigenvalues)` for a PSD matrix.
#[pyfunction]
#[pyo3(signature = (h, tol = PSD_RANK_TOL))]
fn psd_check(h: &PyMatrix, tol: f64) -> PyResult<(usize, bool, Vec<f64>)> {
    let v = psd_apportionability_with_tol(&h.0, tol).map_err(err)?;
    Ok((v.rank, v.u_apportionable, v.eigenvalues))
}

fn options(restarts: usize, iters: usize, seed: u64, jobs: usize) -> SearchOptions {
    SearchOptions { restarts, iters, seed, jobs }
}

#[pyfunction(name = "search_unitary")]
#[pyo3(signature = (a, restarts = 8, iters = 240, seed = 0, jobs = 0))]
fn py_search_unitary(
    py: Python<'_>,
    a: &PyMatrix,
    restarts: usize,
    iters: usize,
    seed: u64,
    jobs: usize,
) -> PyResult<PyReport> {
    let m = a.0.clone();
    py.detach(|| search_unitary(&m, &options(restarts, iters, seed, jobs))).map(PyReport).map_err(err)
}

#[pyfunction(name = "search_gl")]
#[pyo3(signature = (a, restarts = 8, iters = 240, seed = 0, jobs = 0))]
fn py_search_gl(
    py: Python<'_>,
    a: &PyMatrix,
    restarts: usize,
    iters: usize,
    seed: u64,
    jobs: usize,
) -> PyResult<PyReport> {
    let m = a.0.clone();
    py.detach(|| search_gl(&m, &options(restarts, iters, seed, jobs))).map(PyReport).map_err(err)
}

#[pyfunction(name = "uar_estimate")]
#[pyo3(signature = (a, restarts = 8, iters = 240, seed = 0, jobs = 0))]
fn py_uar_estimate(
    py: Python<'_>,
    a: &PyMatrix,
    restarts: usize,
    iters: usize,
    seed: u64,
    jobs: usize,
) -> PyResult<f64> {
    let m = a.0.clone();
    py.detach(|| uar_estimate(&m, &options(restarts, iters, seed, jobs))).map_err(err)
}

/// Searches the restricted group for an element apportioning the blowup of
/// `g`; returns `(permutation, report)` or `None`.
#[pyfunction]
fn apportion_blowup(g: &PyGraph) -> PyResult<Option<(Vec<usize>, PyReport)>> {
    Ok(apportion_blowup_restricted(&g.0).map_err(err)?.map(|(p, r)| (p, PyReport(r))))
}

/// `(value, permutation, evaluated)`: the group minimum of `‖V A V*‖_max`,
/// exhaustive unless `samples` is given.
#[pyfunction]
#[pyo3(signature = (a, n, samples = None, seed = 0))]
fn group_min(
    py: Python<'_>,
    a: &PyMatrix,
    n: usize,
    samples: Option<usize>,
    seed: u64,
) -> PyResult<(f64, Vec<usize>, usize)> {
    let mode = samples.map_or(GroupSearch::Exhaustive, |samples| GroupSearch::Sampled { samples, seed });
    let m = a.0.clone();
    let best = py.detach(|| frak_u_min(&m, n, mode)).map_err(err)?;
    Ok((best.value, best.perm, best.evaluated))
}

/// `(ℓ, lower, λ_ℓ, upper, pass)`.
type BoundRow = (usize, f64, f64, f64, bool);

/// `(sum_residual, rows)`, one row per eigenvalue of `m`.
#[pyfunction]
fn interlace(m: &PyMatrix, g: &PyGraph) -> PyResult<(f64, Vec<BoundRow>)> {
    let fam = mask_family(&m.0, &g.0).map_err(err)?;
    let residual = check_sum_identity(&fam).map_err(err)?;
    let rows = interlacing_bounds(&fam).map_err(err)?;
    Ok((residual, rows.into_iter().map(|r| (r.ell, r.lower, r.lambda, r.upper, r.pass)).collect()))
}

/// Rebuilds the tree of a function from its edge-labeling factors (a
/// `Function`, or a list of coefficient vectors) and orients it towards
/// `fixed_point`. Returns `(graph, function)`.
#[pyfunction]
#[pyo3(signature = (source, fixed_point = 0))]
fn recover(source: &Bound<'_, PyAny>, fixed_point: usize) -> PyResult<(PyGraph, PyFunction)> {
    let fac = if let Ok(f) = source.cast::<PyFunction>() {
        edge_labeling_factors(&f.get().0)
    } else {
        let coeffs: Vec<Vec<i64>> = source.extract()?;
        let forms = coeffs.into_iter().map(LinearForm::new).collect::<Result<Vec<_>, _>>().map_err(err)?;
        FactorMultiset::from_forms(forms).map_err(err)?
    };
    let rec = recover_graph(&fac).map_err(err)?;
    let f = recover_function(&rec.graph, fixed_point).map_err(err)?;
    Ok((PyGraph(rec.graph), PyFunction(f)))
}

/// Multiplicities of `1, −1, −i, i` among the eigenvalues of `Matrix.dft(n)`.
#[pyfunction]
fn dft_eigenvalue_counts(n: usize) -> [usize; 4] {
    let c = dft_multiplicities(n);
    [c[0], c[1], c[3], c[2]]
}

#[pymodule]
fn pyapportion(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMatrix>()?;
    m.add_class::<PyFunction>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(matrix_norms, m)?)?;
    m.add_function(wrap_pyfunction!(py_apportion_rank_one, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(psd_check, m)?)?;
    m.add_function(wrap_pyfunction!(py_search_unitary, m)?)?;
    m.add_function(wrap_pyfunction!(py_search_gl, m)?)?;
    m.add_function(wrap_pyfunction!(py_uar_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(apportion_blowup, m)?)?;
    m.add_function(wrap_pyfunction!(group_min, m)?)?;
    m.add_function(wrap_pyfunction!(interlace, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(dft_eigenvalue_counts, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
