//! Splitting of centrosymmetric linear systems from tomographic
//! reconstruction.
//!
//! When rays and voxels are numbered so that `w[i][j] == w[M-i+1][N-j+1]`,
//! the system `A f = p` separates into two independent systems of a quarter
//! of the size. They can be solved concurrently and recombined into an exact
//! or minimum-norm least-squares solution of the full system.
//!
//! - [`centro`]: symmetry check, splitting, recombination and identities.
//! - [`solvers`]: dense minimum-norm, CGLS and SART, plus direct and split drivers.
//! - [`geometry`]: tomosynthesis scan geometry, snake numbering, ray tracing.
//! - [`phantom`]: Shepp–Logan phantom and forward projection.
//! - [`io`]: Matrix Market, vector CSV, PGM and benchmark reports.
//! - [`bench`]: direct-versus-split benchmark harness.

pub mod bench;
pub mod centro;
pub mod error;
pub mod example1;
pub mod geometry;
pub mod io;
pub mod matrix;
pub mod phantom;
pub mod pipeline;
pub mod solvers;

pub use centro::{
    check_det_identity, decompose_solution, gram_split_check, norm_identity, recombine_solution,
    reconstruct_matrix, split_rhs, split_system, symmetrize, verify_symmetry,
    CentroSymmetricSystem, SolutionPair, SplitSystem, SymmetryReport,
};
pub use error::{Error, Result};
pub use geometry::{build_system, GridSpec, ScanConfig, ScanGeometry, SnakeNumbering};
pub use matrix::Matrix;
pub use solvers::{
    cgls_solve, pseudo_solve_dense, sart_solve, solve_direct, solve_split, DenseSvd, Method, Mode,
    SolveOptions, SolveReport,
};
