use std::path::Path;
use std::process::{Command, Output};

fn symsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symsplit"))
        .args(args)
        .env_remove("SYMSPLIT_PARALLEL")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_config(dir: &Path, n: usize) -> String {
    let path = dir.join(format!("scan{n}.cfg"));
    std::fs::write(
        &path,
        format!("k = {}\ngrid_nx = {n}\ngrid_ny = {n}\n", (3 * n / 4).max(2) / 2 * 2),
    )
    .unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn example1_passes_and_perturbation_fails() {
    let ok = symsplit(&["example1"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).trim_end().ends_with("example1: PASS"));

    let bad = symsplit(&["example1", "--perturb", "-0.5"]);
    assert_eq!(code(&bad), 1);
    assert!(stdout(&bad).contains("FAIL"));

    let json = symsplit(&["example1", "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v["pass"], true);
    assert_eq!(v["f"].as_array().unwrap().len(), 6);
}

#[test]
fn usage_and_io_errors_have_distinct_codes() {
    assert_eq!(code(&symsplit(&["solve", "--mode", "split"])), 2);
    assert_eq!(code(&symsplit(&["--parallel", "0", "example1"])), 2);
    let missing = symsplit(&[
        "solve", "--matrix", "/nonexistent/a.mtx", "--rhs", "/nonexistent/p.csv", "--mode", "direct",
    ]);
    assert_eq!(code(&missing), 3);
    assert!(stderr(&missing).contains("/nonexistent/a.mtx"));

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.cfg");
    std::fs::write(&cfg, "k = 7\n").unwrap();
    let out = symsplit(&[
        "recon",
        "--config",
        cfg.to_str().unwrap(),
        "--out-image",
        dir.path().join("x.pgm").to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn split_solve_rejects_an_asymmetric_matrix_but_direct_accepts_it() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.mtx");
    let p = dir.path().join("p.csv");
    std::fs::write(
        &a,
        "%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1.0\n1 2 2.0\n2 2 5.0\n",
    )
    .unwrap();
    std::fs::write(&p, "1\n2\n").unwrap();
    let (a, p) = (a.to_str().unwrap(), p.to_str().unwrap());

    let split = symsplit(&["solve", "--matrix", a, "--rhs", p, "--mode", "split"]);
    assert_eq!(code(&split), 1);
    let msg = stderr(&split);
    assert!(msg.contains("centrosymmetry") && msg.contains("(1, 1)"), "{msg}");

    let direct = symsplit(&["solve", "--matrix", a, "--rhs", p, "--mode", "direct", "--json"]);
    assert_eq!(code(&direct), 0, "{}", stderr(&direct));
    let v: serde_json::Value = serde_json::from_slice(&direct.stdout).unwrap();
    let f: Vec<f64> = serde_json::from_value(v["f"].clone()).unwrap();
    assert!((f[1] - 0.4).abs() < 1e-12 && (f[0] - 0.2).abs() < 1e-12, "{f:?}");
}

#[test]
fn build_then_solve_reproduces_the_phantom() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16);
    let path = |name: &str| dir.path().join(name).to_string_lossy().into_owned();
    let build = symsplit(&[
        "build",
        "--config",
        &cfg,
        "--out-matrix",
        &path("a.mtx"),
        "--out-rhs",
        &path("p.csv"),
        "--out-truth",
        &path("t.csv"),
        "--phantom",
        "modified-shepp-logan",
        "--json",
    ]);
    assert_eq!(code(&build), 0, "{}", stderr(&build));
    let summary: serde_json::Value = serde_json::from_slice(&build.stdout).unwrap();
    assert_eq!(summary["cols"], 256);
    assert_eq!(summary["symmetric_at_zero_tol"], true);

    for method in ["dense", "cgls"] {
        let out = symsplit(&[
            "solve",
            "--matrix",
            &path("a.mtx"),
            "--rhs",
            &path("p.csv"),
            "--mode",
            "split",
            "--method",
            method,
            "--truth",
            &path("t.csv"),
            "--out",
            &path("f.csv"),
            "--json",
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        let rel = v["relative_error"].as_f64().unwrap();
        let limit = if method == "dense" { 1e-8 } else { 1e-3 };
        assert!(rel <= limit, "{method}: relative error {rel}");
        assert_eq!(v["branches"].as_array().unwrap().len(), 2);
    }
    let f = std::fs::read_to_string(path("f.csv")).unwrap();
    assert_eq!(f.lines().count(), 256);
}

#[test]
fn bench_skips_sizes_over_the_dense_cap() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("bench.json");
    let out = symsplit(&[
        "bench",
        "--sizes",
        "8,16",
        "--reps",
        "1",
        "--method",
        "dense",
        "--dense-cap",
        "20000",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert!(stdout(&out).contains("8x8: speedup"));
    assert!(stderr(&out).contains("skipping 16x16"));
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows.iter().all(|r| r["label"] == "8x8"));
}

#[test]
fn recon_writes_a_full_range_image() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), 16);
    let image = dir.path().join("r.pgm");
    let out = symsplit(&[
        "--parallel",
        "2",
        "recon",
        "--config",
        &cfg,
        "--out-image",
        image.to_str().unwrap(),
        "--json",
    ]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["relative_error"].as_f64().unwrap() < 1e-8);
    let bytes = std::fs::read(&image).unwrap();
    assert!(bytes.starts_with(b"P5\n16 16\n255\n"));
    let pixels = &bytes[bytes.len() - 256..];
    assert_eq!(pixels.iter().max(), Some(&255));
    assert_eq!(pixels.iter().min(), Some(&0));
}
