//! The 4x6 worked example and its four-decimal reference solutions.

use crate::centro::CentroSymmetricSystem;
use crate::matrix::Matrix;

pub const MATRIX: [[f64; 6]; 4] = [
    [1.0, 3.0, 5.0, 7.0, 9.0, 1.0],
    [2.0, 4.0, 6.0, 8.0, 3.0, 7.0],
    [7.0, 3.0, 8.0, 6.0, 4.0, 2.0],
    [1.0, 9.0, 7.0, 5.0, 3.0, 1.0],
];
pub const RHS: [f64; 4] = [5.0, 6.0, 8.0, 7.0];

pub const A1: [[f64; 3]; 2] = [[0.0, -6.0, -2.0], [-5.0, 1.0, -2.0]];
pub const P1: [f64; 2] = [-2.0, -2.0];
pub const A2: [[f64; 3]; 2] = [[2.0, 12.0, 12.0], [9.0, 7.0, 14.0]];
pub const P2: [f64; 2] = [12.0, 14.0];

pub const EXPECTED_F1: [f64; 3] = [0.3512, 0.2508, 0.2475];
pub const EXPECTED_F2: [f64; 3] = [0.3542, 0.3373, 0.6036];
pub const EXPECTED_F: [f64; 6] = [0.3527, 0.2941, 0.4256, 0.1781, 0.0433, 0.0015];
pub const EXPECTED_NORM_F1: f64 = 0.4975;
pub const EXPECTED_NORM_F2: f64 = 0.7769;
pub const EXPECTED_NORM_F: f64 = 0.6523;

pub fn matrix() -> Matrix {
    Matrix::from_rows(&MATRIX).expect("static example")
}

pub fn rhs() -> Vec<f64> {
    RHS.to_vec()
}

pub fn system() -> CentroSymmetricSystem {
    CentroSymmetricSystem::new(matrix(), rhs(), 0.0).expect("example is centrosymmetric")
}
