//! End-to-end runs of the `hybrid-cv` binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hybrid-cv"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

#[test]
fn factorize_exit_codes() {
    let ok = run(&["factorize", "--kind", "azimuthal", "--alpha", "3,0", "--zeta", "0.8,0"]);
    assert_eq!(code(&ok), 0, "{}", stderr(&ok));
    assert!(stdout(&ok).starts_with("max deviation"));
    let zero = run(&["factorize", "--alpha", "0,0", "--zeta", "0,0"]);
    assert_eq!(code(&zero), 0);
    assert!(stdout(&zero).starts_with("max deviation 0 "));
    assert_eq!(
        code(&run(&[
            "factorize",
            "--tol",
            "1e-30",
            "--alpha",
            "3,0",
            "--zeta",
            "0.8,0"
        ])),
        1
    );
    let bad = run(&["factorize", "--alpha", "three"]);
    assert_eq!(code(&bad), 2);
    assert!(stderr(&bad).contains("Usage"));
    assert_eq!(code(&run(&["factorize", "--zeta", "9,0"])), 2);
}

#[test]
fn duan_scan_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("scan.csv");
    let o = run(&["duan", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), hybrid_cv::cli::DUAN_CSV_HEADER);
    let rows: Vec<Vec<&str>> = lines.map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 21 * 3);
    for r in &rows {
        let s: f64 = r[0].parse().unwrap();
        let lhs: f64 = r[5].parse().unwrap();
        let gap: f64 = r[10].parse().unwrap();
        assert!(gap < 1e-6);
        if s == 0.0 {
            assert!((lhs - 1.0).abs() < 1e-9);
            assert_eq!(r[7], "false");
        } else {
            assert_eq!(r[7], "true");
        }
    }
    assert!(stdout(&o).starts_with("max_rel_gap="));
}

#[test]
fn duan_is_deterministic_and_write_failures_exit_3() {
    let a = run(&["duan", "--steps", "5", "--format", "json"]);
    let b = run(&["duan", "--steps", "5", "--format", "json"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let o = run(&["duan", "--steps", "3", "--out", "/nonexistent-dir/x.csv"]);
    assert_eq!(code(&o), 3);
    assert_eq!(code(&run(&["duan", "--s-min", "-1"])), 2);
}

#[test]
fn config_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"steps": 2, "s_max": 1.0, "dofs": "hybrid"}"#).unwrap();
    let o = run(&["duan", "--steps", "9", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().last().unwrap().starts_with("1,2,3,spa,pol,0.567667641618"));
    std::fs::write(&cfg, r#"{"no_such_flag": 1}"#).unwrap();
    assert_eq!(code(&run(&["duan", "--config", cfg.to_str().unwrap()])), 2);
}

#[test]
fn detect_fits() {
    let o = run(&["detect", "--fit-db", "-0.6", "--scheme", "direct"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ratio = v["fit"]["variance_ratio"].as_f64().unwrap();
    assert!((ratio - 0.87096).abs() < 1e-5);
    let s = v["fit"]["value"].as_f64().unwrap();

    let o = run(&[
        "detect",
        "--fit-db",
        "-0.5",
        "--scheme",
        "sum",
        "--fit-param",
        "eta",
        "--s",
        &s.to_string(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["fit"]["variance_ratio"].as_f64().unwrap() - 0.89125).abs() < 1e-5);
    assert!((v["result"]["db_vs_qnl"].as_f64().unwrap() + 0.5).abs() < 0.01);

    let o = run(&["detect", "--fit-db", "-3", "--fit-param", "eta", "--s", "0.01"]);
    assert_eq!(code(&o), 4);
    assert!(stderr(&o).contains("achievable"));
}

#[test]
fn detect_coherent_reads_zero_db() {
    for scheme in ["direct", "sum", "difference"] {
        let o = run(&["detect", "--s", "0", "--scheme", scheme]);
        assert_eq!(code(&o), 0);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
        assert!(v["result"]["db_vs_qnl"].as_f64().unwrap().abs() < 1e-10, "{scheme}");
    }
}

#[test]
fn mode_and_schmidt() {
    let dir = tempfile::tempdir().unwrap();
    let pgm = dir.path().join("radial.pgm");
    let o = run(&[
        "mode",
        "--kind",
        "radial",
        "--grid",
        "64",
        "--out",
        pgm.to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("K=2.000000"));
    let bytes = std::fs::read(&pgm).unwrap();
    assert!(bytes.starts_with(b"P5\n64 64\n255\n"));
    assert_eq!(bytes.len(), "P5\n64 64\n255\n".len() + 64 * 64);

    let pure = dir.path().join("pure.json");
    std::fs::write(
        &pure,
        r#"{"pol_basis":"linear_xy","spa_basis":"HG_10_01","coeffs":[[0,0],[1,0],[0,0],[0,0]]}"#,
    )
    .unwrap();
    let o = run(&["schmidt", pure.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("K=1.000000") && stdout(&o).contains("separable"));

    let uneven = dir.path().join("uneven.json");
    let (a, b) = (0.8f64.sqrt(), 0.2f64.sqrt());
    std::fs::write(
        &uneven,
        format!(r#"{{"pol_basis":"linear_xy","spa_basis":"HG_10_01","coeffs":[[{a},0],[0,0],[0,0],[{b},0]]}}"#),
    )
    .unwrap();
    let o = run(&["schmidt", "--format", "json", uneven.to_str().unwrap()]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!((v["schmidt_rank"].as_f64().unwrap() - 1.470588).abs() < 1e-6);

    let broken = dir.path().join("broken.json");
    std::fs::write(
        &broken,
        r#"{"pol_basis":"linear_xy","spa_basis":"HG_10_01","coeffs":[[0,0],[1,"x"]]}"#,
    )
    .unwrap();
    let o = run(&["schmidt", broken.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("coeffs"), "{}", stderr(&o));
}

#[test]
fn stokes_dump() {
    let o = run(&["stokes", "--alpha", "2,0", "--zeta", "0,0", "--aux-amplitude", "1"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let arms = v["arms"].as_array().unwrap();
    assert_eq!(arms.len(), 2);
    // |α/√2|² = 2 signal photons and 1 auxiliary photon per arm
    let s0 = arms[0]["mean"][0].as_f64().unwrap();
    assert!((s0 - 3.0).abs() < 1e-12);
    let csv = run(&["stokes", "--format", "csv"]);
    assert_eq!(stdout(&csv).lines().count(), 9);
}

#[test]
fn verbose_goes_to_stderr_only() {
    let quiet = run(&["factorize", "--alpha", "1,0", "--zeta", "0.3,0"]);
    let loud = run(&["factorize", "--alpha", "1,0", "--zeta", "0.3,0", "--verbose"]);
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(stderr(&loud).contains("exit 0"));
}
