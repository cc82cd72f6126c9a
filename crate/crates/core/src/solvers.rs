//! Least-squares solvers and the direct/split drivers.
//!
//! Every solver here is sequential and deterministic. The only concurrency is
//! in [`solve_split`], which runs its two branch solves through
//! `rayon::join`; the thread count of the surrounding pool therefore changes
//! scheduling but never the bytes of the result.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use faer::diag::Diag;
use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::svd::{self, ComputeSvdVectors};
use faer::{Mat, Par};
use serde::Serialize;

use crate::centro::{
    recombine_solution, split_system, CentroSymmetricSystem, SolutionPair, SplitSystem,
};
use crate::error::{Error, Result};
use crate::matrix::{dot, norm2, Matrix};

pub const DEFAULT_DENSE_CAP: usize = 50_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    #[serde(rename = "dense")]
    DenseMinNorm,
    Cgls,
    Sart,
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::DenseMinNorm => "dense",
            Method::Cgls => "cgls",
            Method::Sart => "sart",
        })
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dense" | "dense_minnorm" => Ok(Method::DenseMinNorm),
            "cgls" => Ok(Method::Cgls),
            "sart" => Ok(Method::Sart),
            _ => Err(format!(
                "unknown method `{s}` (expected dense, cgls or sart)"
            )),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Direct,
    Split,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Direct => "direct",
            Mode::Split => "split",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "direct" => Ok(Mode::Direct),
            "split" => Ok(Mode::Split),
            _ => Err(format!("unknown mode `{s}` (expected direct or split)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveOptions {
    pub method: Method,
    pub max_iters: usize,
    /// Relative stopping tolerance: normal-equation residual for CGLS,
    /// residual for SART.
    pub tol: f64,
    /// SART relaxation, in `(0, 2]`.
    pub relaxation: f64,
    /// Largest `rows * cols` the dense solver will densify.
    pub dense_cap: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            method: Method::DenseMinNorm,
            max_iters: 200,
            tol: 1e-10,
            relaxation: 1.0,
            dense_cap: DEFAULT_DENSE_CAP,
        }
    }
}

impl SolveOptions {
    pub fn with_method(method: Method) -> Self {
        Self {
            method,
            ..Self::default()
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.tol > 0.0) {
            return bad(format!("tolerance must be positive, got {}", self.tol));
        }
        if self.max_iters == 0 {
            return bad("max_iters must be at least 1".into());
        }
        if !(self.relaxation > 0.0 && self.relaxation <= 2.0) {
            return bad(format!(
                "relaxation must lie in (0, 2], got {}",
                self.relaxation
            ));
        }
        Ok(())
    }
}

/// Outcome of one solver run on one (sub)system.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BranchReport {
    pub rows: usize,
    pub cols: usize,
    pub residual_norm: f64,
    pub solution_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    pub wall_time_seconds: f64,
    /// Per-iteration `‖b - A x_k‖₂` for iterative methods (CGLS) or the
    /// row-weighted residual (SART); empty for the dense solver.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolveReport {
    pub f: Vec<f64>,
    /// `‖A f - p‖₂` on the full system.
    pub residual_norm: f64,
    pub solution_norm: f64,
    pub iterations: usize,
    pub wall_time_seconds: f64,
    pub method: Method,
    pub mode: Mode,
    pub converged: bool,
    /// For split mode, `sqrt((‖r1‖² + ‖r2‖²) / 2)` from the branch residuals,
    /// which equals the full residual in exact arithmetic.
    pub recombined_residual: Option<f64>,
    /// One entry in direct mode; antisymmetric then symmetric branch in split
    /// mode.
    pub branches: Vec<BranchReport>,
}

struct Solution {
    x: Vec<f64>,
    iterations: usize,
    converged: bool,
    history: Vec<f64>,
}

fn check_rhs(a: &Matrix, p: &[f64]) -> Result<()> {
    if p.len() != a.rows() {
        return Err(Error::DimensionMismatch {
            context: "right-hand side",
            expected: a.rows(),
            found: p.len(),
        });
    }
    if p.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("right-hand side"));
    }
    Ok(())
}

/// Thin SVD `A = U Σ Vᵀ` of a densified matrix.
pub struct DenseSvd {
    rows: usize,
    cols: usize,
    u: Mat<f64>,
    v: Mat<f64>,
    sigma: Vec<f64>,
}

impl DenseSvd {
    /// Fails with [`Error::SizeCap`] when `rows * cols` exceeds `dense_cap`.
    pub fn compute(a: &Matrix, dense_cap: usize) -> Result<Self> {
        let (m, n) = a.shape();
        if m.saturating_mul(n) > dense_cap {
            return Err(Error::SizeCap {
                rows: m,
                cols: n,
                cap: dense_cap,
            });
        }
        let mat = a.to_faer();
        let k = m.min(n);
        let mut u = Mat::<f64>::zeros(m, k);
        let mut v = Mat::<f64>::zeros(n, k);
        let mut s = Diag::<f64>::zeros(k);
        let par = Par::Seq;
        let mut mem = MemBuffer::new(svd::svd_scratch::<f64>(
            m,
            n,
            ComputeSvdVectors::Thin,
            ComputeSvdVectors::Thin,
            par,
            Default::default(),
        ));
        svd::svd(
            mat.as_ref(),
            s.as_mut(),
            Some(u.as_mut()),
            Some(v.as_mut()),
            par,
            MemStack::new(&mut mem),
            Default::default(),
        )
        .map_err(|e| Error::Diverged {
            iteration: 0,
            detail: format!("SVD did not converge: {e:?}"),
        })?;
        let col = s.column_vector();
        let sigma = (0..k).map(|i| col[i]).collect();
        Ok(Self {
            rows: m,
            cols: n,
            u,
            v,
            sigma,
        })
    }

    pub fn singular_values(&self) -> &[f64] {
        &self.sigma
    }

    pub fn sigma_max(&self) -> f64 {
        self.sigma.iter().copied().fold(0.0, f64::max)
    }

    /// `max(M, N) · ε · σ_max`.
    pub fn default_cutoff(&self) -> f64 {
        self.rows.max(self.cols) as f64 * f64::EPSILON * self.sigma_max()
    }

    /// Number of singular values above `cutoff`.
    pub fn rank(&self, cutoff: f64) -> usize {
        self.sigma
            .iter()
            .filter(|&&s| s > cutoff && s != 0.0)
            .count()
    }

    /// `Σ_{σ_c > cutoff} v_c (u_cᵀ p) / σ_c`.
    pub fn solve(&self, p: &[f64], cutoff: f64) -> Result<Vec<f64>> {
        if p.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "right-hand side",
                expected: self.rows,
                found: p.len(),
            });
        }
        let mut f = vec![0.0; self.cols];
        for (c, &sc) in self.sigma.iter().enumerate() {
            if sc <= cutoff || sc == 0.0 {
                continue;
            }
            let uc = self.u.col(c);
            let coeff = (0..self.rows).map(|i| uc[i] * p[i]).sum::<f64>() / sc;
            let vc = self.v.col(c);
            for (j, fj) in f.iter_mut().enumerate() {
                *fj += coeff * vc[j];
            }
        }
        Ok(f)
    }
}

/// Minimum-norm least-squares solution `A⁺ p` from a thin SVD.
///
/// Singular values at or below `max(M, N) · ε · σ_max` are treated as zero.
pub fn pseudo_solve_dense(a: &Matrix, p: &[f64], dense_cap: usize) -> Result<Vec<f64>> {
    check_rhs(a, p)?;
    let svd = DenseSvd::compute(a, dense_cap)?;
    svd.solve(p, svd.default_cutoff())
}

fn check_finite(v: &[f64], iteration: usize, what: &str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::Diverged {
            iteration,
            detail: format!("non-finite {what}"),
        })
    }
}

/// Conjugate gradients on the normal equations, started from zero so that
/// the iterates stay in the row space of `A`.
fn cgls(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<Solution> {
    let (m, n) = a.shape();
    let mut x = vec![0.0; n];
    let mut r = p.to_vec();
    let mut s = vec![0.0; n];
    a.tmatvec_into(&r, &mut s);
    let mut d = s.clone();
    let mut q = vec![0.0; m];
    let mut gamma = dot(&s, &s);
    let gamma0 = gamma;
    let mut history = vec![norm2(&r)];
    if gamma0 == 0.0 {
        return Ok(Solution {
            x,
            iterations: 0,
            converged: true,
            history,
        });
    }
    let target = opts.tol * gamma0.sqrt();
    let mut converged = false;
    let mut iterations = 0;
    for k in 1..=opts.max_iters {
        iterations = k;
        a.matvec_into(&d, &mut q);
        let delta = dot(&q, &q);
        if delta == 0.0 {
            converged = true;
            break;
        }
        let alpha = gamma / delta;
        for (xi, di) in x.iter_mut().zip(&d) {
            *xi += alpha * di;
        }
        for (ri, qi) in r.iter_mut().zip(&q) {
            *ri -= alpha * qi;
        }
        a.tmatvec_into(&r, &mut s);
        let gamma_new = dot(&s, &s);
        check_finite(&x, k, "CGLS iterate")?;
        if !gamma_new.is_finite() {
            return Err(Error::Diverged {
                iteration: k,
                detail: "non-finite normal residual".into(),
            });
        }
        history.push(norm2(&r));
        if gamma_new.sqrt() <= target {
            converged = true;
            break;
        }
        let beta = gamma_new / gamma;
        for (di, si) in d.iter_mut().zip(&s) {
            *di = si + beta * *di;
        }
        gamma = gamma_new;
    }
    Ok(Solution {
        x,
        iterations,
        converged,
        history,
    })
}

/// Simultaneous algebraic reconstruction with row and column normalisation
/// by absolute sums, started from zero.
///
/// `x += λ · C⁻¹ Aᵀ R⁻¹ (p - A x)` with `R = diag(Σ_j |a_ij|)` and
/// `C = diag(Σ_i |a_ij|)`. Absolute sums reduce to the usual weights for
/// nonnegative matrices and keep the update convergent for the signed
/// matrices produced by splitting. Zero rows and columns are skipped.
fn sart(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<Solution> {
    let (m, n) = a.shape();
    let mut row_sum = vec![0.0; m];
    let mut col_sum = vec![0.0; n];
    for (i, rs) in row_sum.iter_mut().enumerate() {
        a.for_each_in_row(i, |j, v| {
            *rs += v.abs();
            col_sum[j] += v.abs();
        });
    }
    if row_sum.iter().all(|&s| s == 0.0) {
        return Err(Error::ZeroMatrix);
    }
    let inv = |s: f64| if s > 0.0 { 1.0 / s } else { 0.0 };
    let row_w: Vec<f64> = row_sum.iter().map(|&s| inv(s)).collect();
    let col_w: Vec<f64> = col_sum.iter().map(|&s| inv(s)).collect();
    let p_norm = norm2(p);
    let mut x = vec![0.0; n];
    let mut ax = vec![0.0; m];
    let mut u = vec![0.0; m];
    let mut g = vec![0.0; n];
    let mut history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    for k in 0..=opts.max_iters {
        a.matvec_into(&x, &mut ax);
        let mut weighted = 0.0;
        let mut plain = 0.0;
        for i in 0..m {
            let r = p[i] - ax[i];
            plain += r * r;
            weighted += r * r * row_w[i];
            u[i] = r * row_w[i];
        }
        history.push(weighted.sqrt());
        if !plain.is_finite() {
            return Err(Error::Diverged {
                iteration: k,
                detail: "non-finite SART residual".into(),
            });
        }
        if plain.sqrt() <= opts.tol * p_norm {
            converged = true;
            break;
        }
        if k == opts.max_iters {
            break;
        }
        iterations = k + 1;
        a.tmatvec_into(&u, &mut g);
        for j in 0..n {
            x[j] += opts.relaxation * col_w[j] * g[j];
        }
    }
    Ok(Solution {
        x,
        iterations,
        converged,
        history,
    })
}

fn run_method(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<Solution> {
    check_rhs(a, p)?;
    match opts.method {
        Method::DenseMinNorm => Ok(Solution {
            x: pseudo_solve_dense(a, p, opts.dense_cap)?,
            iterations: 0,
            converged: true,
            history: Vec::new(),
        }),
        Method::Cgls => cgls(a, p, opts),
        Method::Sart => sart(a, p, opts),
    }
}

fn residual_norm(a: &Matrix, x: &[f64], p: &[f64]) -> f64 {
    let mut ax = vec![0.0; a.rows()];
    a.matvec_into(x, &mut ax);
    ax.iter()
        .zip(p)
        .map(|(u, v)| (u - v) * (u - v))
        .sum::<f64>()
        .sqrt()
}

fn solve_branch(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<(Vec<f64>, BranchReport)> {
    let start = Instant::now();
    let sol = run_method(a, p, opts)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();
    let report = BranchReport {
        rows: a.rows(),
        cols: a.cols(),
        residual_norm: residual_norm(a, &sol.x, p),
        solution_norm: norm2(&sol.x),
        iterations: sol.iterations,
        converged: sol.converged,
        wall_time_seconds,
        history: sol.history,
    };
    Ok((sol.x, report))
}

/// CGLS on an arbitrary matrix.
pub fn cgls_solve(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    solve_matrix(
        a,
        p,
        &SolveOptions {
            method: Method::Cgls,
            ..opts.clone()
        },
    )
}

/// SART on an arbitrary matrix.
pub fn sart_solve(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    solve_matrix(
        a,
        p,
        &SolveOptions {
            method: Method::Sart,
            ..opts.clone()
        },
    )
}

/// Solves the full system with `opts.method`. No symmetry is required.
pub fn solve_matrix(a: &Matrix, p: &[f64], opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let (f, branch) = solve_branch(a, p, opts)?;
    let wall_time_seconds = start.elapsed().as_secs_f64();
    Ok(SolveReport {
        residual_norm: branch.residual_norm,
        solution_norm: branch.solution_norm,
        iterations: branch.iterations,
        converged: branch.converged,
        wall_time_seconds,
        method: opts.method,
        mode: Mode::Direct,
        recombined_residual: None,
        branches: vec![branch],
        f,
    })
}

pub fn solve_direct(sys: &CentroSymmetricSystem, opts: &SolveOptions) -> Result<SolveReport> {
    solve_matrix(sys.matrix(), sys.rhs(), opts)
}

type BranchResult = Result<(Vec<f64>, BranchReport)>;

/// Dense branches share one rank cutoff, the full-system threshold
/// `max(M, N) · ε · σ_max(A)`. The split is an orthogonal
/// block-diagonalization, so `σ(A)` is the union of `σ(A1)` and `σ(A2)` and
/// the branches make the same rank decisions as the full solve.
fn split_dense(
    split: &SplitSystem,
    full_shape: (usize, usize),
    opts: &SolveOptions,
) -> Result<((Vec<f64>, BranchReport), (Vec<f64>, BranchReport))> {
    let timed_svd = |a: &Matrix, p: &[f64]| -> Result<(DenseSvd, f64)> {
        let start = Instant::now();
        check_rhs(a, p)?;
        let svd = DenseSvd::compute(a, opts.dense_cap)?;
        Ok((svd, start.elapsed().as_secs_f64()))
    };
    let (s1, s2) = rayon::join(
        || timed_svd(&split.a1, &split.p1),
        || timed_svd(&split.a2, &split.p2),
    );
    let ((svd1, t1), (svd2, t2)) = both(s1, s2)?;
    let cutoff = full_shape.0.max(full_shape.1) as f64
        * f64::EPSILON
        * svd1.sigma_max().max(svd2.sigma_max());
    let finish = |a: &Matrix, p: &[f64], svd: DenseSvd, svd_seconds: f64| -> BranchResult {
        let start = Instant::now();
        let x = svd.solve(p, cutoff)?;
        let report = BranchReport {
            rows: a.rows(),
            cols: a.cols(),
            residual_norm: residual_norm(a, &x, p),
            solution_norm: norm2(&x),
            iterations: 0,
            converged: true,
            wall_time_seconds: svd_seconds + start.elapsed().as_secs_f64(),
            history: Vec::new(),
        };
        Ok((x, report))
    };
    let (r1, r2) = rayon::join(
        || finish(&split.a1, &split.p1, svd1, t1),
        || finish(&split.a2, &split.p2, svd2, t2),
    );
    both(r1, r2)
}

fn both<A, B>(first: Result<A>, second: Result<B>) -> Result<(A, B)> {
    match (first, second) {
        (Ok(a), Ok(b)) => Ok((a, b)),
        (a, b) => Err(Error::Branch {
            first: a.err().map(Box::new),
            second: b.err().map(Box::new),
        }),
    }
}

/// Splits the system, solves both halves concurrently and recombines.
pub fn solve_split(sys: &CentroSymmetricSystem, opts: &SolveOptions) -> Result<SolveReport> {
    opts.validate()?;
    let start = Instant::now();
    let split = split_system(sys);
    let ((f1, b1), (f2, b2)) = if opts.method == Method::DenseMinNorm {
        split_dense(&split, sys.matrix().shape(), opts)?
    } else {
        let (first, second) = rayon::join(
            || solve_branch(&split.a1, &split.p1, opts),
            || solve_branch(&split.a2, &split.p2, opts),
        );
        both(first, second)?
    };
    let f = recombine_solution(&SolutionPair::new(f1, f2)?);
    let wall_time_seconds = start.elapsed().as_secs_f64();

    let recombined = (0.5 * (b1.residual_norm.powi(2) + b2.residual_norm.powi(2))).sqrt();
    Ok(SolveReport {
        residual_norm: residual_norm(sys.matrix(), &f, sys.rhs()),
        solution_norm: norm2(&f),
        iterations: b1.iterations.max(b2.iterations),
        converged: b1.converged && b2.converged,
        wall_time_seconds,
        method: opts.method,
        mode: Mode::Split,
        recombined_residual: Some(recombined),
        branches: vec![b1, b2],
        f,
    })
}

/// Dispatches on `mode`.
pub fn solve(sys: &CentroSymmetricSystem, mode: Mode, opts: &SolveOptions) -> Result<SolveReport> {
    match mode {
        Mode::Direct => solve_direct(sys, opts),
        Mode::Split => solve_split(sys, opts),
    }
}
