//! Python module `pysymsplit`.
//!
//! Matrices cross the boundary either as nested lists (rows of floats) or as
//! [`PyMatrix`] handles, which keep sparse storage on the Rust side.

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use symsplit::centro::{self, SymmetryReport};
use symsplit::geometry::{ScanConfig, TomoSystem};
use symsplit::io;
use symsplit::phantom::{GaussianNoise, PhantomKind};
use symsplit::pipeline;
use symsplit::solvers::{self, BranchReport, DEFAULT_DENSE_CAP};
use symsplit::{CentroSymmetricSystem, Matrix, Method, Mode, SolveOptions, SolveReport};

create_exception!(pysymsplit, SymsplitError, PyValueError);
create_exception!(pysymsplit, AsymmetricError, SymsplitError);

fn to_py(e: symsplit::Error) -> PyErr {
    match e {
        symsplit::Error::Asymmetric(_) => AsymmetricError::new_err(e.to_string()),
        other => SymsplitError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for symsplit::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn parse<T: std::str::FromStr<Err = String>>(s: &str) -> PyResult<T> {
    s.parse().map_err(SymsplitError::new_err)
}

fn rows_of(a: &Matrix) -> Vec<Vec<f64>> {
    let (m, n) = a.shape();
    let dense = a.to_dense_values();
    (0..m).map(|i| dense[i * n..(i + 1) * n].to_vec()).collect()
}

/// Accepts a `Matrix` handle or a sequence of equal-length rows.
fn extract_matrix(obj: &Bound<'_, PyAny>) -> PyResult<Matrix> {
    if let Ok(m) = obj.cast::<PyMatrix>() {
        return Ok(m.borrow().inner.clone());
    }
    let rows: Vec<Vec<f64>> = obj.extract()?;
    Matrix::from_rows(&rows).py_err()
}

/// A real matrix in dense or compressed sparse row storage.
#[pyclass(name = "Matrix", module = "pysymsplit", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyMatrix {
    inner: Matrix,
}

#[pymethods]
impl PyMatrix {
    #[new]
    fn new(rows: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(Self {
            inner: extract_matrix(rows)?,
        })
    }

    /// Builds a sparse matrix from 0-based `(row, col, value)` triplets.
    #[staticmethod]
    fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: Vec<(usize, usize, f64)>,
    ) -> PyResult<Self> {
        Ok(Self {
            inner: Matrix::from_triplets(rows, cols, &triplets).py_err()?,
        })
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.shape()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    #[getter]
    fn is_sparse(&self) -> bool {
        self.inner.is_sparse()
    }

    fn get(&self, i: usize, j: usize) -> PyResult<f64> {
        let (m, n) = self.inner.shape();
        if i >= m || j >= n {
            return Err(SymsplitError::new_err(format!(
                "index ({i}, {j}) outside a {m}x{n} matrix"
            )));
        }
        Ok(self.inner.get(i, j))
    }

    fn to_list(&self) -> Vec<Vec<f64>> {
        rows_of(&self.inner)
    }

    fn triplets(&self) -> Vec<(usize, usize, f64)> {
        self.inner.triplets()
    }

    fn matvec(&self, x: Vec<f64>) -> PyResult<Vec<f64>> {
        self.inner.matvec(&x).py_err()
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.shape();
        let kind = if self.inner.is_sparse() {
            "sparse"
        } else {
            "dense"
        };
        format!("Matrix({m}x{n}, {kind}, nnz={})", self.inner.nnz())
    }
}

fn symmetry_dict<'py>(py: Python<'py>, r: &SymmetryReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("holds", r.holds)?;
    d.set_item("max_violation", r.max_violation)?;
    d.set_item("worst_index", r.worst_index)?;
    d.set_item("tol", r.tol)?;
    d.set_item("message", r.to_string())?;
    Ok(d)
}

fn branch_dict<'py>(py: Python<'py>, b: &BranchReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("rows", b.rows)?;
    d.set_item("cols", b.cols)?;
    d.set_item("residual_norm", b.residual_norm)?;
    d.set_item("solution_norm", b.solution_norm)?;
    d.set_item("iterations", b.iterations)?;
    d.set_item("converged", b.converged)?;
    d.set_item("wall_time_seconds", b.wall_time_seconds)?;
    d.set_item("history", b.history.clone())?;
    Ok(d)
}

/// Outcome of a direct or split solve.
#[pyclass(name = "SolveReport", module = "pysymsplit", frozen)]
pub struct PySolveReport {
    inner: SolveReport,
}

#[pymethods]
impl PySolveReport {
    #[getter]
    fn f(&self) -> Vec<f64> {
        self.inner.f.clone()
    }

    #[getter]
    fn residual_norm(&self) -> f64 {
        self.inner.residual_norm
    }

    #[getter]
    fn recombined_residual(&self) -> Option<f64> {
        self.inner.recombined_residual
    }

    #[getter]
    fn solution_norm(&self) -> f64 {
        self.inner.solution_norm
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn wall_time_seconds(&self) -> f64 {
        self.inner.wall_time_seconds
    }

    #[getter]
    fn method(&self) -> String {
        self.inner.method.to_string()
    }

    #[getter]
    fn mode(&self) -> String {
        self.inner.mode.to_string()
    }

    #[getter]
    fn branches<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.inner
            .branches
            .iter()
            .map(|b| branch_dict(py, b))
            .collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "SolveReport(mode={}, method={}, n={}, residual={:.3e})",
            self.inner.mode,
            self.inner.method,
            self.inner.f.len(),
            self.inner.residual_norm
        )
    }
}

/// The two independent half-size systems.
#[pyclass(name = "SplitSystem", module = "pysymsplit", frozen)]
pub struct PySplitSystem {
    inner: centro::SplitSystem,
}

#[pymethods]
impl PySplitSystem {
    /// Antisymmetric half `A1`.
    #[getter]
    fn a1(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.a1.clone(),
        }
    }

    /// Symmetric half `A2`.
    #[getter]
    fn a2(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.a2.clone(),
        }
    }

    #[getter]
    fn p1(&self) -> Vec<f64> {
        self.inner.p1.clone()
    }

    #[getter]
    fn p2(&self) -> Vec<f64> {
        self.inner.p2.clone()
    }

    /// Nonzero fraction of the full matrix and of each half.
    #[getter]
    fn fill(&self) -> (f64, f64, f64) {
        let f = self.inner.fill;
        (f.full, f.antisymmetric, f.symmetric)
    }

    /// Reassembles the full matrix from the two halves.
    fn reconstruct_matrix(&self) -> PyResult<PyMatrix> {
        Ok(PyMatrix {
            inner: self.inner.reconstruct_matrix().py_err()?,
        })
    }
}

/// A system `A f = p` whose matrix has been checked for centrosymmetry.
#[pyclass(name = "CentroSymmetricSystem", module = "pysymsplit", frozen)]
pub struct PySystem {
    inner: CentroSymmetricSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (matrix, rhs, symmetry_tol = centro::DEFAULT_SYMMETRY_TOL))]
    fn new(matrix: &Bound<'_, PyAny>, rhs: Vec<f64>, symmetry_tol: f64) -> PyResult<Self> {
        let a = extract_matrix(matrix)?;
        Ok(Self {
            inner: CentroSymmetricSystem::new(a, rhs, symmetry_tol).py_err()?,
        })
    }

    #[getter]
    fn matrix(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.matrix().clone(),
        }
    }

    #[getter]
    fn rhs(&self) -> Vec<f64> {
        self.inner.rhs().to_vec()
    }

    #[getter]
    fn shape(&self) -> (usize, usize) {
        self.inner.matrix().shape()
    }

    fn symmetry_report<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        symmetry_dict(py, self.inner.symmetry_report())
    }

    fn split(&self) -> PySplitSystem {
        PySplitSystem {
            inner: centro::split_system(&self.inner),
        }
    }

    /// Solves directly or through the split. `method` is `dense`, `cgls`
    /// or `sart`. The GIL is released while the solver runs.
    #[pyo3(signature = (
        mode = "split",
        method = "dense",
        max_iters = 5000,
        tol = 1e-8,
        relaxation = 1.0,
        dense_cap = DEFAULT_DENSE_CAP,
    ))]
    fn solve(
        &self,
        py: Python<'_>,
        mode: &str,
        method: &str,
        max_iters: usize,
        tol: f64,
        relaxation: f64,
        dense_cap: usize,
    ) -> PyResult<PySolveReport> {
        let mode: Mode = parse(mode)?;
        let opts = SolveOptions {
            method: parse::<Method>(method)?,
            max_iters,
            tol,
            relaxation,
            dense_cap,
        };
        let report = py
            .detach(|| solvers::solve(&self.inner, mode, &opts))
            .py_err()?;
        Ok(PySolveReport { inner: report })
    }

    fn __repr__(&self) -> String {
        let (m, n) = self.inner.matrix().shape();
        format!("CentroSymmetricSystem({m}x{n})")
    }
}

/// Minimum-norm least-squares solution of `A f = p` by thin SVD.
#[pyfunction]
#[pyo3(signature = (matrix, rhs, dense_cap = DEFAULT_DENSE_CAP))]
fn pseudo_solve(matrix: &Bound<'_, PyAny>, rhs: Vec<f64>, dense_cap: usize) -> PyResult<Vec<f64>> {
    let a = extract_matrix(matrix)?;
    symsplit::pseudo_solve_dense(&a, &rhs, dense_cap).py_err()
}

/// Symmetry report of a bare matrix at tolerance `tol`.
#[pyfunction]
#[pyo3(signature = (matrix, tol = 0.0))]
fn verify_symmetry<'py>(
    py: Python<'py>,
    matrix: &Bound<'_, PyAny>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let a = extract_matrix(matrix)?;
    symmetry_dict(py, &centro::verify_symmetry(&a, tol))
}

/// Mirror-fills a matrix from its first half of rows (row-major order).
#[pyfunction]
fn symmetrize(matrix: &Bound<'_, PyAny>) -> PyResult<PyMatrix> {
    let a = extract_matrix(matrix)?;
    Ok(PyMatrix {
        inner: centro::symmetrize(&a),
    })
}

/// Splits `f` into `(f1, f2)`, the antisymmetric and symmetric parts.
#[pyfunction]
fn decompose_solution(f: Vec<f64>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let pair = centro::decompose_solution(&f).py_err()?;
    Ok((pair.f1().to_vec(), pair.f2().to_vec()))
}

/// Inverse of `decompose_solution`.
#[pyfunction]
fn recombine_solution(f1: Vec<f64>, f2: Vec<f64>) -> PyResult<Vec<f64>> {
    let pair = centro::SolutionPair::new(f1, f2).py_err()?;
    Ok(centro::recombine_solution(&pair))
}

/// `(det A, det A1, det A2)` for a square centrosymmetric matrix.
#[pyfunction]
fn det_identity(matrix: &Bound<'_, PyAny>) -> PyResult<(f64, f64, f64)> {
    let a = extract_matrix(matrix)?;
    let d = centro::check_det_identity(&a).py_err()?;
    Ok((d.det_a, d.det_a1, d.det_a2))
}

/// The 4x6 worked example as a checked system.
#[pyfunction]
fn example1() -> PySystem {
    PySystem {
        inner: symsplit::example1::system(),
    }
}

/// A traced tomosynthesis system.
#[pyclass(name = "TomoSystem", module = "pysymsplit", frozen)]
pub struct PyTomo {
    inner: TomoSystem,
}

#[pymethods]
impl PyTomo {
    #[getter]
    fn matrix(&self) -> PyMatrix {
        PyMatrix {
            inner: self.inner.matrix.clone(),
        }
    }

    /// `(n_x, n_y)` voxels.
    #[getter]
    fn grid(&self) -> (usize, usize) {
        (self.inner.grid.n_x, self.inner.grid.n_y)
    }

    #[getter]
    fn emitter_positions(&self) -> usize {
        self.inner.metadata.emitter_positions
    }

    #[getter]
    fn detector_bins(&self) -> usize {
        self.inner.metadata.detector_bins
    }

    /// Reorders a voxel-ordered vector into row-major image rows.
    fn to_image(&self, values: Vec<f64>) -> PyResult<Vec<Vec<f64>>> {
        let grid = &self.inner.grid;
        if values.len() != grid.n_voxels() {
            return Err(SymsplitError::new_err(format!(
                "expected {} voxel values, got {}",
                grid.n_voxels(),
                values.len()
            )));
        }
        let flat = grid.numbering().to_row_major(&values);
        Ok(flat.chunks(grid.n_x).map(<[f64]>::to_vec).collect())
    }

    fn with_rhs(&self, rhs: Vec<f64>) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: self.inner.with_rhs(rhs).py_err()?,
        })
    }
}

fn scan_config(n: Option<usize>, config: Option<&str>) -> PyResult<ScanConfig> {
    match (n, config) {
        (Some(n), None) => Ok(ScanConfig::table_case(n)),
        (None, Some(text)) => ScanConfig::parse(text).py_err(),
        _ => Err(SymsplitError::new_err(
            "pass exactly one of `n` or `config`",
        )),
    }
}

fn phantom_kind(name: Option<&str>) -> PyResult<Option<PhantomKind>> {
    match name {
        None | Some("none") => Ok(None),
        Some("shepp-logan") => Ok(Some(PhantomKind::SheppLogan)),
        Some("modified-shepp-logan") => Ok(Some(PhantomKind::ModifiedSheppLogan)),
        Some(other) => Err(SymsplitError::new_err(format!(
            "unknown phantom `{other}` (expected shepp-logan, modified-shepp-logan or none)"
        ))),
    }
}

/// Traces an `n x n` grid scan, or a scan described by config text.
#[pyfunction]
#[pyo3(signature = (n = None, config = None))]
fn build_system(py: Python<'_>, n: Option<usize>, config: Option<&str>) -> PyResult<PyTomo> {
    let cfg = scan_config(n, config)?;
    let tomo = py.detach(|| cfg.build()).py_err()?;
    Ok(PyTomo { inner: tomo })
}

/// Traces a scan and projects a phantom through it.
/// Returns `(tomo, system, truth)` with `truth` in voxel order.
#[pyfunction]
#[pyo3(signature = (n = None, config = None, phantom = "shepp-logan", noise_sigma = None, seed = 0))]
fn simulate(
    py: Python<'_>,
    n: Option<usize>,
    config: Option<&str>,
    phantom: Option<&str>,
    noise_sigma: Option<f64>,
    seed: u64,
) -> PyResult<(PyTomo, PySystem, Vec<f64>)> {
    let cfg = scan_config(n, config)?;
    let kind = phantom_kind(phantom)?;
    let noise = noise_sigma.map(|sigma| GaussianNoise { sigma, seed });
    let sim = py
        .detach(|| pipeline::simulate(&cfg, kind, noise))
        .py_err()?;
    Ok((
        PyTomo { inner: sim.tomo },
        PySystem { inner: sim.system },
        sim.truth.values,
    ))
}

/// `‖f - truth‖ / ‖truth‖`.
#[pyfunction]
fn relative_error(f: Vec<f64>, truth: Vec<f64>) -> PyResult<f64> {
    if f.len() != truth.len() {
        return Err(SymsplitError::new_err(format!(
            "length mismatch: {} vs {}",
            f.len(),
            truth.len()
        )));
    }
    Ok(pipeline::relative_error(&f, &truth))
}

#[pyfunction]
fn read_matrix_market(path: std::path::PathBuf) -> PyResult<PyMatrix> {
    Ok(PyMatrix {
        inner: io::read_matrix_market(&path).py_err()?,
    })
}

#[pyfunction]
fn write_matrix_market(matrix: &Bound<'_, PyAny>, path: std::path::PathBuf) -> PyResult<()> {
    io::write_matrix_market(&extract_matrix(matrix)?, &path).py_err()
}

#[pyfunction]
fn read_vector(path: std::path::PathBuf) -> PyResult<Vec<f64>> {
    io::read_vector_csv(&path).py_err()
}

#[pyfunction]
fn write_vector(values: Vec<f64>, path: std::path::PathBuf) -> PyResult<()> {
    io::write_vector_csv(&values, &path).py_err()
}

#[pymodule]
pub fn pysymsplit(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add("SymsplitError", py.get_type::<SymsplitError>())?;
    m.add("AsymmetricError", py.get_type::<AsymmetricError>())?;
    m.add_class::<PyMatrix>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PySplitSystem>()?;
    m.add_class::<PySolveReport>()?;
    m.add_class::<PyTomo>()?;
    m.add_function(wrap_pyfunction!(pseudo_solve, m)?)?;
    m.add_function(wrap_pyfunction!(verify_symmetry, m)?)?;
    m.add_function(wrap_pyfunction!(symmetrize, m)?)?;
    m.add_function(wrap_pyfunction!(decompose_solution, m)?)?;
    m.add_function(wrap_pyfunction!(recombine_solution, m)?)?;
    m.add_function(wrap_pyfunction!(det_identity, m)?)?;
    m.add_function(wrap_pyfunction!(example1, m)?)?;
    m.add_function(wrap_pyfunction!(build_system, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(relative_error, m)?)?;
    m.add_function(wrap_pyfunction!(read_matrix_market, m)?)?;
    m.add_function(wrap_pyfunction!(write_matrix_market, m)?)?;
    m.add_function(wrap_pyfunction!(read_vector, m)?)?;
    m.add_function(wrap_pyfunction!(write_vector, m)?)?;
    Ok(())
}
