//! Build → project → solve pipeline shared by the CLI, the benchmark and the
//! Python bindings.

use serde::Serialize;

use crate::centro::CentroSymmetricSystem;
use crate::error::Result;
use crate::geometry::{ScanConfig, TomoSystem};
use crate::matrix::norm2;
use crate::phantom::{
    forward_project, phantom_ellipses, rasterize, GaussianNoise, PhantomImage, PhantomKind,
};
use crate::solvers::{solve, Mode, SolveOptions, SolveReport};

/// A traced system with a phantom and its projections.
pub struct Simulation {
    pub tomo: TomoSystem,
    pub truth: PhantomImage,
    pub system: CentroSymmetricSystem,
}

pub fn simulate(
    config: &ScanConfig,
    phantom: Option<PhantomKind>,
    noise: Option<GaussianNoise>,
) -> Result<Simulation> {
    let tomo = config.build()?;
    let truth = match phantom {
        Some(kind) => rasterize(&phantom_ellipses(kind), &tomo.grid),
        None => rasterize(&[], &tomo.grid),
    };
    let p = forward_project(&tomo.matrix, &truth.values, noise)?;
    let system = tomo.with_rhs(p)?;
    Ok(Simulation {
        tomo,
        truth,
        system,
    })
}

/// `‖f - truth‖ / ‖truth‖`, or the absolute error when the truth is zero.
pub fn relative_error(f: &[f64], truth: &[f64]) -> f64 {
    let diff: Vec<f64> = f.iter().zip(truth).map(|(a, b)| a - b).collect();
    let scale = norm2(truth);
    if scale == 0.0 {
        norm2(&diff)
    } else {
        norm2(&diff) / scale
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Reconstruction {
    pub report: SolveReport,
    pub rel_error: f64,
    pub relative_residual: f64,
}

pub fn reconstruct(sim: &Simulation, mode: Mode, opts: &SolveOptions) -> Result<Reconstruction> {
    let report = solve(&sim.system, mode, opts)?;
    let rel_error = relative_error(&report.f, &sim.truth.values);
    let p_norm = norm2(sim.system.rhs());
    let relative_residual = if p_norm == 0.0 {
        report.residual_norm
    } else {
        report.residual_norm / p_norm
    };
    Ok(Reconstruction {
        report,
        rel_error,
        relative_residual,
    })
}
