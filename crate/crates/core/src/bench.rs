//! Direct-versus-split timing over the `n x n` benchmark series.

use serde::Serialize;

use crate::error::Result;
use crate::geometry::ScanConfig;
use crate::io::BenchRecord;
use crate::phantom::PhantomKind;
use crate::pipeline::{reconstruct, simulate};
use crate::solvers::{Method, Mode, SolveOptions, DEFAULT_DENSE_CAP};

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub modes: Vec<Mode>,
    pub reps: usize,
    /// Fixed method, or `None` to use the dense solver whenever the matrix
    /// fits under `dense_cap` and CGLS otherwise.
    pub method: Option<Method>,
    pub dense_cap: usize,
    pub iter_tol: f64,
    pub max_iters: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            sizes: vec![32, 64],
            modes: vec![Mode::Direct, Mode::Split],
            reps: 5,
            method: None,
            dense_cap: DEFAULT_DENSE_CAP,
            iter_tol: 1e-8,
            max_iters: 5000,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ModeTiming {
    pub mode: Mode,
    pub min_seconds: f64,
    pub max_seconds: f64,
    pub mean_seconds: f64,
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseResult {
    pub label: String,
    pub n: usize,
    pub method: Method,
    pub records: Vec<BenchRecord>,
    pub timings: Vec<ModeTiming>,
    /// `t_direct / t_split` from the minimum over repetitions, when both
    /// modes ran.
    pub speedup: Option<f64>,
    /// Solutions in the order of `timings`.
    #[serde(skip)]
    pub solutions: Vec<Vec<f64>>,
}

impl CaseResult {
    pub fn record(&self, mode: Mode) -> Option<&BenchRecord> {
        self.records.iter().find(|r| r.mode == mode.to_string())
    }
}

pub fn run_case(n: usize, cfg: &BenchConfig) -> Result<CaseResult> {
    let config = ScanConfig::table_case(n);
    let sim = simulate(&config, Some(PhantomKind::SheppLogan), None)?;
    let a = sim.system.matrix();
    let (rows, cols) = a.shape();
    let method = cfg
        .method
        .unwrap_or(if rows.saturating_mul(cols) <= cfg.dense_cap {
            Method::DenseMinNorm
        } else {
            Method::Cgls
        });
    let opts = SolveOptions {
        method,
        max_iters: cfg.max_iters,
        tol: cfg.iter_tol,
        relaxation: 1.0,
        dense_cap: cfg.dense_cap,
    };
    let label = format!("{n}x{n}");
    let reps = cfg.reps.max(1);
    let mut records = Vec::new();
    let mut timings = Vec::new();
    let mut solutions = Vec::new();
    for &mode in &cfg.modes {
        let mut times = Vec::with_capacity(reps);
        let mut last = None;
        for _ in 0..reps {
            let rec = reconstruct(&sim, mode, &opts)?;
            times.push(rec.report.wall_time_seconds);
            last = Some(rec);
        }
        let rec = last.expect("at least one repetition");
        let min = times.iter().copied().fold(f64::INFINITY, f64::min);
        let max = times.iter().copied().fold(0.0, f64::max);
        records.push(BenchRecord {
            label: label.clone(),
            rows,
            cols,
            nnz: a.nnz(),
            method: method.to_string(),
            mode: mode.to_string(),
            wall_time_seconds: min,
            residual_norm: rec.report.residual_norm,
            rel_error: Some(rec.rel_error),
            reps,
        });
        timings.push(ModeTiming {
            mode,
            min_seconds: min,
            max_seconds: max,
            mean_seconds: times.iter().sum::<f64>() / reps as f64,
            iterations: rec.report.iterations,
            converged: rec.report.converged,
        });
        solutions.push(rec.report.f);
    }
    let time_of = |m: Mode| timings.iter().find(|t| t.mode == m).map(|t| t.min_seconds);
    let speedup = match (time_of(Mode::Direct), time_of(Mode::Split)) {
        (Some(d), Some(s)) if s > 0.0 => Some(d / s),
        _ => None,
    };
    Ok(CaseResult {
        label,
        n,
        method,
        records,
        timings,
        speedup,
        solutions,
    })
}

pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<CaseResult>> {
    cfg.sizes.iter().map(|&n| run_case(n, cfg)).collect()
}
