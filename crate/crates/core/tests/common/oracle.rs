//! Reference linear algebra written independently of the library.

/// One-sided Jacobi SVD: rotates column pairs of `A` until they are
/// mutually orthogonal, giving `A V = W` with orthogonal columns.
/// Singular values are the column norms of `W`.
pub struct JacobiSvd {
    rows: usize,
    cols: usize,
    /// Columns of `W = A V`.
    w: Vec<Vec<f64>>,
    /// Columns of `V`.
    v: Vec<Vec<f64>>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn rotate(a: &mut [Vec<f64>], i: usize, j: usize, c: f64, s: f64) {
    for k in 0..a[i].len() {
        let (x, y) = (a[i][k], a[j][k]);
        a[i][k] = c * x - s * y;
        a[j][k] = s * x + c * y;
    }
}

impl JacobiSvd {
    /// `values` is row-major `rows x cols`.
    pub fn new(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        let mut w: Vec<Vec<f64>> = (0..cols)
            .map(|j| (0..rows).map(|i| values[i * cols + j]).collect())
            .collect();
        let mut v: Vec<Vec<f64>> = (0..cols)
            .map(|j| (0..cols).map(|k| if k == j { 1.0 } else { 0.0 }).collect())
            .collect();
        for _sweep in 0..200 {
            let mut rotated = false;
            for i in 0..cols {
                for j in i + 1..cols {
                    let alpha = dot(&w[i], &w[i]);
                    let beta = dot(&w[j], &w[j]);
                    let gamma = dot(&w[i], &w[j]);
                    if gamma == 0.0 || gamma.abs() <= f64::EPSILON * (alpha * beta).sqrt() {
                        continue;
                    }
                    rotated = true;
                    let zeta = (beta - alpha) / (2.0 * gamma);
                    let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = c * t;
                    rotate(&mut w, i, j, c, s);
                    rotate(&mut v, i, j, c, s);
                }
            }
            if !rotated {
                break;
            }
        }
        Self { rows, cols, w, v }
    }

    pub fn singular_values(&self) -> Vec<f64> {
        let mut s: Vec<f64> = self.w.iter().map(|c| dot(c, c).sqrt()).collect();
        s.sort_by(|a, b| b.total_cmp(a));
        s
    }

    pub fn sigma_max(&self) -> f64 {
        self.w.iter().map(|c| dot(c, c).sqrt()).fold(0.0, f64::max)
    }

    /// `A⁺ p` keeping singular values above `cutoff`.
    pub fn solve(&self, p: &[f64], cutoff: f64) -> Vec<f64> {
        assert_eq!(p.len(), self.rows);
        let mut f = vec![0.0; self.cols];
        for (wk, vk) in self.w.iter().zip(&self.v) {
            let s2 = dot(wk, wk);
            if s2.sqrt() <= cutoff || s2 == 0.0 {
                continue;
            }
            let coeff = dot(wk, p) / s2;
            for (fj, vj) in f.iter_mut().zip(vk) {
                *fj += coeff * vj;
            }
        }
        f
    }
}

/// Minimum-norm least-squares solution with the cutoff
/// `max(M, N) · ε · σ_max`.
pub fn min_norm_solve(rows: usize, cols: usize, values: &[f64], p: &[f64]) -> Vec<f64> {
    let svd = JacobiSvd::new(rows, cols, values);
    let cutoff = rows.max(cols) as f64 * f64::EPSILON * svd.sigma_max();
    svd.solve(p, cutoff)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant(n: usize, values: &[f64]) -> f64 {
    let mut a = values.to_vec();
    let mut det = 1.0;
    for k in 0..n {
        let piv = (k..n)
            .max_by(|&x, &y| a[x * n + k].abs().total_cmp(&a[y * n + k].abs()))
            .unwrap();
        if a[piv * n + k] == 0.0 {
            return 0.0;
        }
        if piv != k {
            for c in 0..n {
                a.swap(k * n + c, piv * n + c);
            }
            det = -det;
        }
        let d = a[k * n + k];
        det *= d;
        for r in k + 1..n {
            let factor = a[r * n + k] / d;
            for c in k..n {
                a[r * n + c] -= factor * a[k * n + c];
            }
        }
    }
    det
}
