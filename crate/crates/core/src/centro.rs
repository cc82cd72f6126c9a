//! Centrosymmetric systems and their splitting into two independent
//! quarter-size systems.
//!
//! A matrix `A` of shape `M x N` (both even) is centrosymmetric when
//! `w[i][j] == w[M-i+1][N-j+1]` (1-based). For such a matrix the system
//! `A f = p` decouples into
//!
//! ```text
//! A1 f1 = p1,   A1[i][j] = w[i][j] - w[M-i+1][j],   p1[i] = p[i] - p[M-i+1]
//! A2 f2 = p2,   A2[i][j] = w[i][j] + w[M-i+1][j],   p2[i] = p[i] + p[M-i+1]
//! ```
//!
//! for `i <= M/2`, `j <= N/2`, and any pair of solutions recombines into a
//! solution of the full system through
//! `f[j] = (f2[j] + f1[j]) / 2`, `f[N-j+1] = (f2[j] - f1[j]) / 2`.
//! The same recombination maps the two minimum-norm least-squares solutions
//! onto the minimum-norm least-squares solution of the full system.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::{Matrix, Storage};

/// Default tolerance for systems built by this crate.
pub const DEFAULT_SYMMETRY_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SymmetryStatus {
    Holds,
    OddRows,
    OddCols,
    ExceedsTolerance,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub max_violation: f64,
    pub holds: bool,
    /// 1-based `(row, col)` of a largest violation, `None` when every mirror
    /// pair matches exactly.
    pub worst_index: Option<(usize, usize)>,
    pub status: SymmetryStatus,
    pub tol: f64,
}

impl fmt::Display for SymmetryReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.status {
            SymmetryStatus::Holds => write!(f, "holds (max violation {:e})", self.max_violation),
            SymmetryStatus::OddRows => f.write_str("row count is odd"),
            SymmetryStatus::OddCols => f.write_str("column count is odd"),
            SymmetryStatus::ExceedsTolerance => {
                write!(
                    f,
                    "max violation {:e} exceeds tolerance {:e}",
                    self.max_violation, self.tol
                )?;
                if let Some((i, j)) = self.worst_index {
                    write!(f, " at ({i}, {j})")?;
                }
                Ok(())
            }
        }
    }
}

/// Checks `w[i][j] == w[M-i+1][N-j+1]` to within `tol`.
pub fn verify_symmetry(a: &Matrix, tol: f64) -> SymmetryReport {
    let (m, n) = a.shape();
    let mut max_violation = 0.0_f64;
    let mut worst = None;
    for i in 0..m {
        a.for_each_in_row(i, |j, v| {
            let d = (v - a.get(m - 1 - i, n - 1 - j)).abs();
            if d > max_violation {
                max_violation = d;
                worst = Some((i + 1, j + 1));
            }
        });
    }
    let status = if m % 2 != 0 {
        SymmetryStatus::OddRows
    } else if n % 2 != 0 {
        SymmetryStatus::OddCols
    } else if max_violation > tol {
        SymmetryStatus::ExceedsTolerance
    } else {
        SymmetryStatus::Holds
    };
    SymmetryReport {
        max_violation,
        holds: status == SymmetryStatus::Holds,
        worst_index: worst,
        status,
        tol,
    }
}

/// Replaces every mirror pair by its average, giving an exactly
/// centrosymmetric matrix of the same storage kind.
pub fn symmetrize(a: &Matrix) -> Matrix {
    let (m, n) = a.shape();
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    for i in 0..m {
        a.for_each_in_row(i, |j, v| {
            per_row[i].push((j, v));
            per_row[m - 1 - i].push((n - 1 - j, v));
        });
    }
    let per_row = per_row
        .into_iter()
        .map(|mut row| {
            row.sort_by_key(|&(j, _)| j);
            let mut merged: Vec<(usize, f64)> = Vec::with_capacity(row.len());
            for (j, v) in row {
                match merged.last_mut() {
                    Some(last) if last.0 == j => last.1 += v,
                    _ => merged.push((j, v)),
                }
            }
            merged.into_iter().map(|(j, s)| (j, 0.5 * s)).collect()
        })
        .collect();
    a.map_storage_like(per_row, m, n)
}

/// A linear system `A f = p` whose matrix passed the centrosymmetry check.
#[derive(Clone, Debug)]
pub struct CentroSymmetricSystem {
    matrix: Matrix,
    rhs: Vec<f64>,
    symmetry_tol: f64,
    report: SymmetryReport,
}

impl CentroSymmetricSystem {
    pub fn new(matrix: Matrix, rhs: Vec<f64>, symmetry_tol: f64) -> Result<Self> {
        if rhs.len() != matrix.rows() {
            return Err(Error::DimensionMismatch {
                context: "right-hand side",
                expected: matrix.rows(),
                found: rhs.len(),
            });
        }
        if rhs.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("right-hand side"));
        }
        let report = verify_symmetry(&matrix, symmetry_tol);
        if !report.holds {
            return Err(Error::Asymmetric(report));
        }
        Ok(Self {
            matrix,
            rhs,
            symmetry_tol,
            report,
        })
    }

    pub fn with_default_tol(matrix: Matrix, rhs: Vec<f64>) -> Result<Self> {
        Self::new(matrix, rhs, DEFAULT_SYMMETRY_TOL)
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn symmetry_tol(&self) -> f64 {
        self.symmetry_tol
    }

    pub fn symmetry_report(&self) -> &SymmetryReport {
        &self.report
    }

    pub fn into_parts(self) -> (Matrix, Vec<f64>) {
        (self.matrix, self.rhs)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FillRatios {
    pub full: f64,
    pub antisymmetric: f64,
    pub symmetric: f64,
}

/// The pair of independent `(M/2) x (N/2)` systems.
#[derive(Clone, Debug)]
pub struct SplitSystem {
    pub a1: Matrix,
    pub p1: Vec<f64>,
    pub a2: Matrix,
    pub p2: Vec<f64>,
    pub fill: FillRatios,
}

impl SplitSystem {
    pub fn reconstruct_matrix(&self) -> Result<Matrix> {
        reconstruct_matrix(&self.a1, &self.a2)
    }
}

pub fn split_system(sys: &CentroSymmetricSystem) -> SplitSystem {
    let (a1, a2) = fold_matrix(sys.matrix());
    let (p1, p2) = fold_vector(sys.rhs());
    let fill = FillRatios {
        full: sys.matrix().fill_ratio(),
        antisymmetric: a1.fill_ratio(),
        symmetric: a2.fill_ratio(),
    };
    SplitSystem {
        a1,
        p1,
        a2,
        p2,
        fill,
    }
}

/// Splits a bare matrix after checking it at `tol`.
pub fn split_matrix(a: &Matrix, tol: f64) -> Result<(Matrix, Matrix)> {
    let report = verify_symmetry(a, tol);
    if !report.holds {
        return Err(Error::Asymmetric(report));
    }
    Ok(fold_matrix(a))
}

/// Computes `A1`, `A2` from the left half of the columns. The right half is
/// determined by the left half through the symmetry and is not read.
/// Exact zeros from cancellation are dropped from sparse results.
fn fold_matrix(a: &Matrix) -> (Matrix, Matrix) {
    let (m, n) = a.shape();
    let (hm, hn) = (m / 2, n / 2);
    match a.storage() {
        Storage::Dense(w) => {
            let mut a1 = Vec::with_capacity(hm * hn);
            let mut a2 = Vec::with_capacity(hm * hn);
            for i in 0..hm {
                let top = &w[i * n..i * n + hn];
                let bottom = &w[(m - 1 - i) * n..(m - 1 - i) * n + hn];
                for (&x, &y) in top.iter().zip(bottom) {
                    a1.push(x - y);
                    a2.push(x + y);
                }
            }
            (
                Matrix::from_dense(hm, hn, a1).expect("finite split"),
                Matrix::from_dense(hm, hn, a2).expect("finite split"),
            )
        }
        Storage::Sparse(_) => {
            let mut rows1 = Vec::with_capacity(hm);
            let mut rows2 = Vec::with_capacity(hm);
            let mut top = Vec::new();
            let mut bottom = Vec::new();
            for i in 0..hm {
                top.clear();
                bottom.clear();
                a.for_each_in_row(i, |j, v| {
                    if j < hn {
                        top.push((j, v));
                    }
                });
                a.for_each_in_row(m - 1 - i, |j, v| {
                    if j < hn {
                        bottom.push((j, v));
                    }
                });
                let (r1, r2) = merge_rows(&top, &bottom);
                rows1.push(r1);
                rows2.push(r2);
            }
            (
                Matrix::from_sorted_rows(hm, hn, rows1),
                Matrix::from_sorted_rows(hm, hn, rows2),
            )
        }
    }
}

/// Merges two column-sorted rows into their difference and sum.
fn merge_rows(x: &[(usize, f64)], y: &[(usize, f64)]) -> (Vec<(usize, f64)>, Vec<(usize, f64)>) {
    let mut diff = Vec::with_capacity(x.len() + y.len());
    let mut sum = Vec::with_capacity(x.len() + y.len());
    let (mut a, mut b) = (0, 0);
    while a < x.len() || b < y.len() {
        let (j, u, v) = match (x.get(a), y.get(b)) {
            (Some(&(ja, u)), Some(&(jb, v))) if ja == jb => {
                a += 1;
                b += 1;
                (ja, u, v)
            }
            (Some(&(ja, u)), Some(&(jb, _))) if ja < jb => {
                a += 1;
                (ja, u, 0.0)
            }
            (Some(&(ja, u)), None) => {
                a += 1;
                (ja, u, 0.0)
            }
            (_, Some(&(jb, v))) => {
                b += 1;
                (jb, 0.0, v)
            }
            (None, None) => unreachable!(),
        };
        let d = u - v;
        let s = u + v;
        if d != 0.0 {
            diff.push((j, d));
        }
        if s != 0.0 {
            sum.push((j, s));
        }
    }
    (diff, sum)
}

fn fold_vector(p: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let m = p.len();
    (0..m / 2)
        .map(|i| (p[i] - p[m - 1 - i], p[i] + p[m - 1 - i]))
        .unzip()
}

/// `p1[i] = p[i] - p[M-i+1]`, `p2[i] = p[i] + p[M-i+1]`.
pub fn split_rhs(p: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if !p.len().is_multiple_of(2) {
        return Err(Error::OddLength {
            what: "right-hand side",
            len: p.len(),
        });
    }
    Ok(fold_vector(p))
}

/// Antisymmetric (`f1`) and symmetric (`f2`) halves of a solution vector.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SolutionPair {
    f1: Vec<f64>,
    f2: Vec<f64>,
}

impl SolutionPair {
    pub fn new(f1: Vec<f64>, f2: Vec<f64>) -> Result<Self> {
        if f1.len() != f2.len() {
            return Err(Error::DimensionMismatch {
                context: "solution pair",
                expected: f1.len(),
                found: f2.len(),
            });
        }
        if f1.iter().chain(&f2).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("solution pair"));
        }
        Ok(Self { f1, f2 })
    }

    pub fn f1(&self) -> &[f64] {
        &self.f1
    }

    pub fn f2(&self) -> &[f64] {
        &self.f2
    }
}

/// `f1[j] = f[j] - f[N-j+1]`, `f2[j] = f[j] + f[N-j+1]`.
pub fn decompose_solution(f: &[f64]) -> Result<SolutionPair> {
    if !f.len().is_multiple_of(2) {
        return Err(Error::OddLength {
            what: "solution",
            len: f.len(),
        });
    }
    let (f1, f2) = fold_vector(f);
    SolutionPair::new(f1, f2)
}

/// `f[j] = (f2[j] + f1[j]) / 2`, `f[N-j+1] = (f2[j] - f1[j]) / 2`.
pub fn recombine_solution(pair: &SolutionPair) -> Vec<f64> {
    let h = pair.f1.len();
    let mut f = vec![0.0; 2 * h];
    for (j, (&a, &s)) in pair.f1.iter().zip(&pair.f2).enumerate() {
        f[j] = 0.5 * (s + a);
        f[2 * h - 1 - j] = 0.5 * (s - a);
    }
    f
}

/// Inverse of the split formulas: rebuilds the full centrosymmetric matrix
/// from `A1` and `A2`.
pub fn reconstruct_matrix(a1: &Matrix, a2: &Matrix) -> Result<Matrix> {
    if a1.shape() != a2.shape() {
        return Err(Error::DimensionMismatch {
            context: "split halves",
            expected: a1.rows() * a1.cols(),
            found: a2.rows() * a2.cols(),
        });
    }
    let (hm, hn) = a1.shape();
    let (m, n) = (2 * hm, 2 * hn);
    let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    let mut r1 = Vec::new();
    let mut r2 = Vec::new();
    for i in 0..hm {
        r1.clear();
        r2.clear();
        a1.for_each_in_row(i, |j, v| r1.push((j, v)));
        a2.for_each_in_row(i, |j, v| r2.push((j, v)));
        // merge_rows(r2, r1) yields (A2 - A1, A2 + A1) per column
        let (minus, plus) = merge_rows(&r2, &r1);
        for (j, s) in plus {
            let top = 0.5 * s;
            per_row[i].push((j, top));
            per_row[m - 1 - i].push((n - 1 - j, top));
        }
        for (j, d) in minus {
            let bottom = 0.5 * d;
            per_row[m - 1 - i].push((j, bottom));
            per_row[i].push((n - 1 - j, bottom));
        }
    }
    for row in &mut per_row {
        row.sort_by_key(|&(j, _)| j);
    }
    let out = Matrix::from_sorted_rows(m, n, per_row);
    Ok(if a1.is_sparse() { out } else { out.to_dense() })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetIdentity {
    pub det_a: f64,
    pub det_a1: f64,
    pub det_a2: f64,
    pub rel_err: f64,
}

/// Compares `det(A)` with `det(A1) * det(A2)` for a square centrosymmetric
/// matrix.
pub fn check_det_identity(a: &Matrix) -> Result<DetIdentity> {
    let (m, n) = a.shape();
    if m != n {
        return Err(Error::NotSquare { rows: m, cols: n });
    }
    let (a1, a2) = split_matrix(a, DEFAULT_SYMMETRY_TOL)?;
    let det_a = determinant(a);
    let det_a1 = determinant(&a1);
    let det_a2 = determinant(&a2);
    let rel_err = (det_a - det_a1 * det_a2).abs() / det_a.abs().max(1.0);
    Ok(DetIdentity {
        det_a,
        det_a1,
        det_a2,
        rel_err,
    })
}

/// Determinant by LU with partial pivoting.
pub fn determinant(a: &Matrix) -> f64 {
    let n = a.rows();
    assert_eq!(n, a.cols(), "determinant of a non-square matrix");
    let mut lu = a.to_dense_values();
    let mut det = 1.0;
    for k in 0..n {
        let pivot = (k..n)
            .max_by(|&x, &y| lu[x * n + k].abs().total_cmp(&lu[y * n + k].abs()))
            .unwrap();
        if lu[pivot * n + k] == 0.0 {
            return 0.0;
        }
        if pivot != k {
            for c in 0..n {
                lu.swap(k * n + c, pivot * n + c);
            }
            det = -det;
        }
        let d = lu[k * n + k];
        det *= d;
        for r in k + 1..n {
            let factor = lu[r * n + k] / d;
            if factor != 0.0 {
                for c in k + 1..n {
                    lu[r * n + c] -= factor * lu[k * n + c];
                }
            }
        }
    }
    det
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramCheck {
    pub b_symmetric: bool,
    pub b_violation: f64,
    pub max_dev1: f64,
    pub max_dev2: f64,
}

/// Checks that `B = AᵀA` is centrosymmetric and that its split halves are
/// `A1ᵀA1` and `A2ᵀA2`.
pub fn gram_split_check(a: &Matrix) -> Result<GramCheck> {
    let (a1, a2) = split_matrix(a, DEFAULT_SYMMETRY_TOL)?;
    let b = a.gram();
    let scale = b
        .to_dense_values()
        .iter()
        .fold(1.0_f64, |s, v| s.max(v.abs()));
    let report = verify_symmetry(&b, 1e-12 * scale);
    let (b1, b2) = fold_matrix(&b);
    let max_dev1 = b1.max_abs_diff(&a1.gram()).expect("same shape");
    let max_dev2 = b2.max_abs_diff(&a2.gram()).expect("same shape");
    Ok(GramCheck {
        b_symmetric: report.holds,
        b_violation: report.max_violation,
        max_dev1,
        max_dev2,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct NormIdentity {
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

/// `‖f‖² = ½‖f1‖² + ½‖f2‖²` for `f = recombine(f1, f2)`.
pub fn norm_identity(pair: &SolutionPair, f: &[f64]) -> NormIdentity {
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let lhs = sq(f);
    let rhs = 0.5 * sq(&pair.f1) + 0.5 * sq(&pair.f2);
    let scale = lhs.max(rhs);
    let rel_err = if scale == 0.0 {
        0.0
    } else {
        (lhs - rhs).abs() / scale
    };
    NormIdentity { lhs, rhs, rel_err }
}
