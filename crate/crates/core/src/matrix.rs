//! Real matrices in dense row-major or compressed sparse row storage.
//!
//! Indices passed to the accessors in this module are 0-based. Everything
//! that reports positions to a user (symmetry reports, file formats, voxel
//! numbering) converts to 1-based at its own boundary.

use faer::Mat;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Storage {
    /// Row-major values, `rows * cols` long.
    Dense(Vec<f64>),
    Sparse(Csr),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    storage: Storage,
}

fn check_shape(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyShape { rows, cols });
    }
    Ok(())
}

impl Matrix {
    pub fn from_dense(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        check_shape(rows, cols)?;
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                context: "dense matrix values",
                expected: rows * cols,
                found: values.len(),
            });
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("matrix"));
        }
        Ok(Self {
            rows,
            cols,
            storage: Storage::Dense(values),
        })
    }

    /// Dense matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch {
                    context: "row length",
                    expected: n_cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::from_dense(n_rows, n_cols, values)
    }

    /// Sparse matrix from 0-based `(row, col, value)` triplets in any order.
    ///
    /// Explicitly stored zeros are kept. Duplicate positions are rejected.
    pub fn from_triplets(
        rows: usize,
        cols: usize,
        triplets: &[(usize, usize, f64)],
    ) -> Result<Self> {
        check_shape(rows, cols)?;
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); rows];
        for &(i, j, v) in triplets {
            if i >= rows || j >= cols {
                return Err(Error::IndexOutOfRange {
                    row: i + 1,
                    col: j + 1,
                    rows,
                    cols,
                });
            }
            if !v.is_finite() {
                return Err(Error::NonFinite("matrix"));
            }
            per_row[i].push((j, v));
        }
        for (i, row) in per_row.iter_mut().enumerate() {
            row.sort_by_key(|&(j, _)| j);
            if let Some(w) = row.windows(2).find(|w| w[0].0 == w[1].0) {
                return Err(Error::DuplicateEntry {
                    row: i + 1,
                    col: w[0].0 + 1,
                });
            }
        }
        Ok(Self::from_sorted_rows(rows, cols, per_row))
    }

    /// Builds CSR storage from rows whose entries are already sorted by column
    /// and free of duplicates.
    pub(crate) fn from_sorted_rows(
        rows: usize,
        cols: usize,
        per_row: Vec<Vec<(usize, f64)>>,
    ) -> Self {
        debug_assert_eq!(per_row.len(), rows);
        let nnz = per_row.iter().map(Vec::len).sum();
        let mut row_ptr = Vec::with_capacity(rows + 1);
        let mut col_idx = Vec::with_capacity(nnz);
        let mut values = Vec::with_capacity(nnz);
        row_ptr.push(0);
        for row in per_row {
            for (j, v) in row {
                debug_assert!(j < cols);
                col_idx.push(j);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        Self {
            rows,
            cols,
            storage: Storage::Sparse(Csr {
                row_ptr,
                col_idx,
                values,
            }),
        }
    }

    pub fn zeros_sparse(rows: usize, cols: usize) -> Result<Self> {
        check_shape(rows, cols)?;
        Ok(Self::from_sorted_rows(rows, cols, vec![Vec::new(); rows]))
    }

    pub fn identity(n: usize) -> Result<Self> {
        check_shape(n, n)?;
        Ok(Self::from_sorted_rows(
            n,
            n,
            (0..n).map(|i| vec![(i, 1.0)]).collect(),
        ))
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn storage(&self) -> &Storage {
        &self.storage
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.storage, Storage::Sparse(_))
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(
            i < self.rows && j < self.cols,
            "index ({i}, {j}) out of bounds"
        );
        match &self.storage {
            Storage::Dense(v) => v[i * self.cols + j],
            Storage::Sparse(csr) => {
                let (cols, vals) = csr.row(i);
                cols.binary_search(&j).map_or(0.0, |k| vals[k])
            }
        }
    }

    /// Stored entries for sparse storage, nonzero values for dense storage.
    pub fn nnz(&self) -> usize {
        match &self.storage {
            Storage::Dense(v) => v.iter().filter(|x| **x != 0.0).count(),
            Storage::Sparse(csr) => csr.values.len(),
        }
    }

    pub fn fill_ratio(&self) -> f64 {
        self.nnz() as f64 / (self.rows as f64 * self.cols as f64)
    }

    /// Visits the entries of row `i` as `(col, value)`: every stored entry for
    /// sparse storage, every nonzero for dense storage.
    pub fn for_each_in_row(&self, i: usize, mut visit: impl FnMut(usize, f64)) {
        match &self.storage {
            Storage::Dense(v) => {
                for (j, &x) in v[i * self.cols..(i + 1) * self.cols].iter().enumerate() {
                    if x != 0.0 {
                        visit(j, x);
                    }
                }
            }
            Storage::Sparse(csr) => {
                let (cols, vals) = csr.row(i);
                for (&j, &x) in cols.iter().zip(vals) {
                    visit(j, x);
                }
            }
        }
    }

    /// 0-based `(row, col, value)` entries in row-major order.
    pub fn triplets(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::with_capacity(self.nnz());
        for i in 0..self.rows {
            self.for_each_in_row(i, |j, v| out.push((i, j, v)));
        }
        out
    }

    pub fn to_dense_values(&self) -> Vec<f64> {
        match &self.storage {
            Storage::Dense(v) => v.clone(),
            Storage::Sparse(_) => {
                let mut out = vec![0.0; self.rows * self.cols];
                for i in 0..self.rows {
                    self.for_each_in_row(i, |j, v| out[i * self.cols + j] = v);
                }
                out
            }
        }
    }

    pub fn to_dense(&self) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            storage: Storage::Dense(self.to_dense_values()),
        }
    }

    pub fn to_sparse(&self) -> Matrix {
        match &self.storage {
            Storage::Sparse(_) => self.clone(),
            Storage::Dense(_) => {
                let per_row = (0..self.rows)
                    .map(|i| {
                        let mut row = Vec::new();
                        self.for_each_in_row(i, |j, v| row.push((j, v)));
                        row
                    })
                    .collect();
                Self::from_sorted_rows(self.rows, self.cols, per_row)
            }
        }
    }

    pub(crate) fn to_faer(&self) -> Mat<f64> {
        let mut out = Mat::<f64>::zeros(self.rows, self.cols);
        for i in 0..self.rows {
            self.for_each_in_row(i, |j, v| out[(i, j)] = v);
        }
        out
    }

    /// `y = A x`.
    pub fn matvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.cols {
            return Err(Error::DimensionMismatch {
                context: "matrix-vector product",
                expected: self.cols,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.rows];
        self.matvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn matvec_into(&self, x: &[f64], y: &mut [f64]) {
        match &self.storage {
            Storage::Dense(v) => {
                for (yi, row) in y.iter_mut().zip(v.chunks_exact(self.cols)) {
                    *yi = row.iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            Storage::Sparse(csr) => {
                for (i, yi) in y.iter_mut().enumerate() {
                    let (cols, vals) = csr.row(i);
                    *yi = cols.iter().zip(vals).map(|(&j, &a)| a * x[j]).sum();
                }
            }
        }
    }

    /// `y = Aᵀ x`.
    pub fn tmatvec(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() != self.rows {
            return Err(Error::DimensionMismatch {
                context: "transposed matrix-vector product",
                expected: self.rows,
                found: x.len(),
            });
        }
        let mut y = vec![0.0; self.cols];
        self.tmatvec_into(x, &mut y);
        Ok(y)
    }

    pub(crate) fn tmatvec_into(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (i, &xi) in x.iter().enumerate() {
            if xi != 0.0 {
                self.for_each_in_row(i, |j, a| y[j] += a * xi);
            }
        }
    }

    pub fn transpose(&self) -> Matrix {
        let mut per_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.cols];
        for i in 0..self.rows {
            self.for_each_in_row(i, |j, v| per_row[j].push((i, v)));
        }
        let t = Self::from_sorted_rows(self.cols, self.rows, per_row);
        if self.is_sparse() {
            t
        } else {
            t.to_dense()
        }
    }

    /// Dense `AᵀA`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut out = vec![0.0; n * n];
        let mut row = Vec::new();
        for i in 0..self.rows {
            row.clear();
            self.for_each_in_row(i, |j, v| row.push((j, v)));
            for &(a, va) in &row {
                for &(b, vb) in &row {
                    out[a * n + b] += va * vb;
                }
            }
        }
        Matrix {
            rows: n,
            cols: n,
            storage: Storage::Dense(out),
        }
    }

    /// Largest componentwise absolute difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Matrix) -> Option<f64> {
        if self.shape() != other.shape() {
            return None;
        }
        let a = self.to_dense_values();
        let b = other.to_dense_values();
        Some(
            a.iter()
                .zip(&b)
                .map(|(x, y)| (x - y).abs())
                .fold(0.0, f64::max),
        )
    }

    pub(crate) fn map_storage_like(
        &self,
        per_row: Vec<Vec<(usize, f64)>>,
        rows: usize,
        cols: usize,
    ) -> Matrix {
        let m = Self::from_sorted_rows(rows, cols, per_row);
        if self.is_sparse() {
            m
        } else {
            m.to_dense()
        }
    }
}

impl Csr {
    fn row(&self, i: usize) -> (&[usize], &[f64]) {
        let (a, b) = (self.row_ptr[i], self.row_ptr[i + 1]);
        (&self.col_idx[a..b], &self.values[a..b])
    }
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
