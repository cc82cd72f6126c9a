#![allow(dead_code)]

pub mod oracle;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symsplit::Matrix;

/// Row-major values with `v[k] == v[len - 1 - k]`, which is exactly the
/// centrosymmetry condition for a `rows x cols` matrix.
pub fn mirror_fill(mut v: Vec<f64>) -> Vec<f64> {
    let len = v.len();
    for k in 0..len {
        let mirror = len - 1 - k;
        if mirror < k {
            v[k] = v[mirror];
        }
    }
    v
}

pub fn random_centro(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let v = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    Matrix::from_dense(rows, cols, mirror_fill(v)).unwrap()
}

/// Exactly rank-deficient centrosymmetric matrix: an integer product of two
/// centrosymmetric factors with inner dimension `rank`.
pub fn low_rank_centro(rows: usize, cols: usize, rank: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let int = |len: usize, rng: &mut ChaCha8Rng| {
        mirror_fill((0..len).map(|_| rng.random_range(-3..=3) as f64).collect())
    };
    let u = int(rows * rank, rng);
    let v = int(rank * cols, rng);
    let mut a = vec![0.0; rows * cols];
    for i in 0..rows {
        for k in 0..rank {
            for j in 0..cols {
                a[i * cols + j] += u[i * rank + k] * v[k * cols + j];
            }
        }
    }
    Matrix::from_dense(rows, cols, a).unwrap()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_vec(len: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

pub fn rel_l2(a: &[f64], b: &[f64]) -> f64 {
    let num: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let den: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if den == 0.0 {
        num
    } else {
        num / den
    }
}

/// Even dimension in `2..=max`.
pub fn even(max: usize) -> impl Strategy<Value = usize> {
    (1..=max / 2).prop_map(|h| 2 * h)
}
