use serde::Serialize;
use symsplit::bench::{run_case, BenchConfig, ModeTiming};
use symsplit::centro::{split_system, verify_symmetry, FillRatios};
use symsplit::geometry::ScanConfig;
use symsplit::io::{
    read_matrix_market, read_vector_csv, write_bench_report, write_matrix_market, write_pgm,
    write_vector_csv, BenchRecord, ReportFormat,
};
use symsplit::phantom::GaussianNoise;
use symsplit::pipeline::{reconstruct, relative_error, simulate};
use symsplit::solvers::solve_matrix;
use symsplit::{CentroSymmetricSystem, Error, Method, Mode, SolveOptions, SolveReport};

use crate::{BenchArgs, BuildArgs, CliError, ReconArgs, SolveArgs};

fn print_json<T: Serialize>(value: &T) -> Result<(), CliError> {
    println!(
        "{}",
        serde_json::to_string_pretty(value).map_err(Error::from)?
    );
    Ok(())
}

fn auto_method(rows: usize, cols: usize, cap: usize) -> Method {
    if rows.saturating_mul(cols) <= cap {
        Method::DenseMinNorm
    } else {
        Method::Cgls
    }
}

#[derive(Serialize)]
struct BuildSummary {
    rows: usize,
    cols: usize,
    nnz: usize,
    fill: FillRatios,
    emitter_positions: usize,
    detector_bins: usize,
    symmetric_at_zero_tol: bool,
    max_violation: f64,
    phantom: bool,
}

pub fn build(args: &BuildArgs, json: bool) -> Result<(), CliError> {
    let config = ScanConfig::from_file(&args.config)?;
    let noise = args.noise_sigma.map(|sigma| GaussianNoise {
        sigma,
        seed: args.seed,
    });
    let sim = simulate(&config, args.phantom.kind(), noise)?;
    let meta = &sim.tomo.metadata;
    let report = verify_symmetry(&sim.tomo.matrix, 0.0);
    let split = split_system(&sim.system);

    write_matrix_market(&sim.tomo.matrix, &args.out_matrix)?;
    if let Some(path) = &args.out_rhs {
        write_vector_csv(sim.system.rhs(), path)?;
    }
    if let Some(path) = &args.out_truth {
        write_vector_csv(&sim.truth.values, path)?;
    }

    let summary = BuildSummary {
        rows: meta.rows,
        cols: meta.cols,
        nnz: meta.nnz,
        fill: split.fill,
        emitter_positions: meta.emitter_positions,
        detector_bins: meta.detector_bins,
        symmetric_at_zero_tol: report.holds,
        max_violation: report.max_violation,
        phantom: args.phantom.kind().is_some(),
    };
    if json {
        print_json(&summary)?;
    } else {
        println!(
            "M = {}, N = {}, nnz = {}",
            summary.rows, summary.cols, summary.nnz
        );
        println!(
            "fill ratio: full {:.5}, A1 {:.5}, A2 {:.5}",
            summary.fill.full, summary.fill.antisymmetric, summary.fill.symmetric
        );
        println!(
            "{} emitter positions x {} detector bins",
            summary.emitter_positions, summary.detector_bins
        );
        println!("centrosymmetry at tol 0: {report}");
    }
    if !report.holds {
        return Err(CliError::CheckFailed(format!(
            "built matrix is not centrosymmetric: {report}"
        )));
    }
    Ok(())
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    #[serde(flatten)]
    report: &'a SolveReport,
    relative_error: Option<f64>,
}

fn print_report(report: &SolveReport, rel_err: Option<f64>) {
    println!(
        "{} solve ({}): {} unknowns, {:.4} s",
        report.mode,
        report.method,
        report.f.len(),
        report.wall_time_seconds
    );
    println!("residual |Af - p| = {:.6e}", report.residual_norm);
    if let Some(r) = report.recombined_residual {
        println!("recombined branch residual = {r:.6e}");
    }
    println!("|f| = {:.6e}", report.solution_norm);
    if report.method != Method::DenseMinNorm {
        println!(
            "iterations = {}, converged = {}",
            report.iterations, report.converged
        );
    }
    for (k, b) in report
        .branches
        .iter()
        .enumerate()
        .filter(|_| report.branches.len() > 1)
    {
        println!(
            "  branch {}: {}x{}, residual {:.3e}, {} iterations, {:.4} s",
            k + 1,
            b.rows,
            b.cols,
            b.residual_norm,
            b.iterations,
            b.wall_time_seconds
        );
    }
    if let Some(e) = rel_err {
        println!("relative error vs truth = {e:.6e}");
    }
}

pub fn solve(args: &SolveArgs, json: bool) -> Result<(), CliError> {
    let a = read_matrix_market(&args.matrix)?;
    let p = read_vector_csv(&args.rhs)?;
    let opts = args.solver.options();
    let report = match args.mode {
        Mode::Direct => solve_matrix(&a, &p, &opts)?,
        Mode::Split => {
            let sys = CentroSymmetricSystem::new(a, p, args.symmetry_tol)?;
            symsplit::solve_split(&sys, &opts)?
        }
    };
    if let Some(path) = &args.out {
        write_vector_csv(&report.f, path)?;
    }
    let rel_err = match &args.truth {
        Some(path) => {
            let truth = read_vector_csv(path)?;
            if truth.len() != report.f.len() {
                return Err(Error::DimensionMismatch {
                    context: "truth vector",
                    expected: report.f.len(),
                    found: truth.len(),
                }
                .into());
            }
            Some(relative_error(&report.f, &truth))
        }
        None => None,
    };
    if json {
        print_json(&SolveOutput {
            report: &report,
            relative_error: rel_err,
        })?;
    } else {
        print_report(&report, rel_err);
    }
    Ok(())
}

#[derive(Serialize)]
struct BenchCaseSummary {
    label: String,
    method: Method,
    timings: Vec<ModeTiming>,
    speedup: Option<f64>,
    skipped: Option<String>,
}

pub fn bench(args: &BenchArgs, json: bool) -> Result<(), CliError> {
    if args.modes.is_empty() || args.sizes.is_empty() {
        return Err(CliError::Usage(
            "bench needs at least one size and one mode".into(),
        ));
    }
    let cfg = BenchConfig {
        sizes: args.sizes.clone(),
        modes: args.modes.clone(),
        reps: args.reps,
        method: args.method,
        dense_cap: args.dense_cap,
        iter_tol: args.tol,
        max_iters: args.max_iters,
    };
    let mut records: Vec<BenchRecord> = Vec::new();
    let mut cases = Vec::new();
    for &n in &args.sizes {
        match run_case(n, &cfg) {
            Ok(case) => {
                if !json {
                    for t in &case.timings {
                        eprintln!(
                            "{}x{} {} {}: min {:.4} s, max {:.4} s over {} reps",
                            n, n, case.method, t.mode, t.min_seconds, t.max_seconds, cfg.reps
                        );
                    }
                    if let Some(s) = case.speedup {
                        println!("{}: speedup t_direct/t_split = {s:.3}", case.label);
                    }
                }
                records.extend(case.records.iter().cloned());
                cases.push(BenchCaseSummary {
                    label: case.label,
                    method: case.method,
                    timings: case.timings,
                    speedup: case.speedup,
                    skipped: None,
                });
            }
            Err(Error::SizeCap { rows, cols, cap }) => {
                let notice = format!("{rows}x{cols} exceeds the dense cap of {cap} entries");
                eprintln!("skipping {n}x{n}: {notice}");
                cases.push(BenchCaseSummary {
                    label: format!("{n}x{n}"),
                    method: Method::DenseMinNorm,
                    timings: Vec::new(),
                    speedup: None,
                    skipped: Some(notice),
                });
            }
            Err(e) => return Err(e.into()),
        }
    }
    if let Some(path) = &args.out {
        write_bench_report(&records, path, ReportFormat::from_path(path))?;
    }
    if json {
        print_json(&cases)?;
    }
    Ok(())
}

#[derive(Serialize)]
struct ReconSummary {
    rows: usize,
    cols: usize,
    method: Method,
    mode: Mode,
    relative_error: f64,
    relative_residual: f64,
    iterations: usize,
    converged: bool,
    wall_time_seconds: f64,
}

pub fn recon(args: &ReconArgs, json: bool) -> Result<(), CliError> {
    let config = ScanConfig::from_file(&args.config)?;
    let sim = simulate(&config, args.phantom.kind(), None)?;
    let (rows, cols) = sim.system.matrix().shape();
    let method = args
        .method
        .unwrap_or_else(|| auto_method(rows, cols, args.dense_cap));
    let opts = SolveOptions {
        method,
        max_iters: args.max_iters,
        tol: args.tol,
        relaxation: 1.0,
        dense_cap: args.dense_cap,
    };
    let rec = reconstruct(&sim, args.mode, &opts)?;
    let grid = &sim.tomo.grid;
    write_pgm(
        &rec.report.f,
        &grid.numbering(),
        grid.n_x,
        grid.n_y,
        &args.out_image,
    )?;
    if let Some(path) = &args.out_values {
        write_vector_csv(&rec.report.f, path)?;
    }
    let summary = ReconSummary {
        rows,
        cols,
        method,
        mode: args.mode,
        relative_error: rec.rel_error,
        relative_residual: rec.relative_residual,
        iterations: rec.report.iterations,
        converged: rec.report.converged,
        wall_time_seconds: rec.report.wall_time_seconds,
    };
    if json {
        print_json(&summary)?;
    } else {
        println!(
            "{}x{} grid, M = {rows}: {} {} solve in {:.4} s",
            grid.n_x, grid.n_y, summary.mode, summary.method, summary.wall_time_seconds
        );
        println!(
            "relative reconstruction error = {:.6e}",
            summary.relative_error
        );
        println!("relative residual = {:.6e}", summary.relative_residual);
        println!("image written to {}", args.out_image.display());
    }
    Ok(())
}
