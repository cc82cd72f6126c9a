use serde::Serialize;
use symsplit::centro::{norm_identity, split_system, CentroSymmetricSystem, SolutionPair};
use symsplit::example1 as ex;
use symsplit::matrix::norm2;
use symsplit::{pseudo_solve_dense, recombine_solution, Matrix};

use crate::{CliError, Example1Args};

const VALUE_TOL: f64 = 1e-4;
const NORM_TOL: f64 = 1e-4;

#[derive(Debug, Serialize)]
struct Check {
    name: String,
    computed: f64,
    expected: f64,
    diff: f64,
    tol: f64,
    pass: bool,
}

#[derive(Debug, Serialize)]
struct Example1Result {
    pass: bool,
    perturb: f64,
    f1: Vec<f64>,
    f2: Vec<f64>,
    f: Vec<f64>,
    norm_f1: f64,
    norm_f2: f64,
    norm_f: f64,
    direct_vs_split: f64,
    checks: Vec<Check>,
}

fn push(checks: &mut Vec<Check>, name: String, computed: f64, expected: f64, tol: f64) {
    let diff = (computed - expected).abs();
    checks.push(Check {
        name,
        computed,
        expected,
        diff,
        tol,
        pass: diff <= tol,
    });
}

fn push_matrix<const C: usize>(
    checks: &mut Vec<Check>,
    label: &str,
    got: &Matrix,
    want: &[[f64; C]],
) {
    for (i, row) in want.iter().enumerate() {
        for (j, &w) in row.iter().enumerate() {
            push(
                checks,
                format!("{label}[{},{}]", i + 1, j + 1),
                got.get(i, j),
                w,
                0.0,
            );
        }
    }
}

fn push_vector(checks: &mut Vec<Check>, label: &str, got: &[f64], want: &[f64], tol: f64) {
    for (i, (&g, &w)) in got.iter().zip(want).enumerate() {
        push(checks, format!("{label}[{}]", i + 1), g, w, tol);
    }
}

pub fn run(args: &Example1Args, json: bool) -> Result<(), CliError> {
    let rhs: Vec<f64> = ex::rhs().iter().map(|v| v + args.perturb).collect();
    let sys = CentroSymmetricSystem::new(ex::matrix(), rhs, 0.0)?;
    let split = split_system(&sys);
    let f1 = pseudo_solve_dense(&split.a1, &split.p1, usize::MAX)?;
    let f2 = pseudo_solve_dense(&split.a2, &split.p2, usize::MAX)?;
    let pair = SolutionPair::new(f1.clone(), f2.clone())?;
    let f = recombine_solution(&pair);
    let direct = pseudo_solve_dense(sys.matrix(), sys.rhs(), usize::MAX)?;
    let direct_vs_split = f
        .iter()
        .zip(&direct)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let identity = norm_identity(&pair, &f);

    let mut checks = Vec::new();
    push_matrix(&mut checks, "A1", &split.a1, &ex::A1);
    push_vector(&mut checks, "p1", &split.p1, &ex::P1, 0.0);
    push_matrix(&mut checks, "A2", &split.a2, &ex::A2);
    push_vector(&mut checks, "p2", &split.p2, &ex::P2, 0.0);
    push_vector(&mut checks, "f1", &f1, &ex::EXPECTED_F1, VALUE_TOL);
    push_vector(&mut checks, "f2", &f2, &ex::EXPECTED_F2, VALUE_TOL);
    push_vector(&mut checks, "f", &f, &ex::EXPECTED_F, VALUE_TOL);
    let (norm_f1, norm_f2, norm_f) = (norm2(&f1), norm2(&f2), norm2(&f));
    push(
        &mut checks,
        "|f1|".into(),
        norm_f1,
        ex::EXPECTED_NORM_F1,
        NORM_TOL,
    );
    push(
        &mut checks,
        "|f2|".into(),
        norm_f2,
        ex::EXPECTED_NORM_F2,
        NORM_TOL,
    );
    push(
        &mut checks,
        "|f|".into(),
        norm_f,
        ex::EXPECTED_NORM_F,
        NORM_TOL,
    );
    push(
        &mut checks,
        "|f|^2 - (|f1|^2+|f2|^2)/2".into(),
        identity.rel_err,
        0.0,
        1e-12,
    );
    push(
        &mut checks,
        "max|f_direct - f_split|".into(),
        direct_vs_split,
        0.0,
        1e-9,
    );

    let pass = checks.iter().all(|c| c.pass);
    let result = Example1Result {
        pass,
        perturb: args.perturb,
        f1,
        f2,
        f,
        norm_f1,
        norm_f2,
        norm_f,
        direct_vs_split,
        checks,
    };

    if json {
        println!(
            "{}",
            serde_json::to_string_pretty(&result).map_err(symsplit::Error::from)?
        );
    } else {
        println!(
            "{:<28} {:>12} {:>12} {:>10}  status",
            "quantity", "computed", "expected", "diff"
        );
        for c in &result.checks {
            println!(
                "{:<28} {:>12.6} {:>12.6} {:>10.2e}  {}",
                c.name,
                c.computed,
                c.expected,
                c.diff,
                if c.pass { "ok" } else { "FAIL" }
            );
        }
        println!("example1: {}", if pass { "PASS" } else { "FAIL" });
    }
    if pass {
        Ok(())
    } else {
        let failed = result.checks.iter().filter(|c| !c.pass).count();
        Err(CliError::CheckFailed(format!(
            "{failed} check(s) outside tolerance"
        )))
    }
}
