use std::path::Path;
use std::process::{Command, Output};

fn ridgelaw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ridgelaw"))
        .args(args)
        .output()
        .expect("spawn ridgelaw")
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

fn read(dir: &Path, name: &str) -> String {
    std::fs::read_to_string(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

#[test]
fn pi_writes_exact_matrices() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelaw(&["--out", &out_arg(dir.path()), "pi", "pipeflow"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        read(dir.path(), "D.csv"),
        "unit,rho,mu,D,eps,dPdL\nkg,1,1,0,0,1\nm,-3,-1,1,1,-2\ns,0,-1,0,0,-2\n"
    );
    assert_eq!(
        read(dir.path(), "w.csv"),
        "quantity,w\nrho,-1\nmu,1\nD,-1\neps,0\ndPdL,0\n"
    );
    let pi: serde_json::Value = serde_json::from_str(&read(dir.path(), "pi.json")).unwrap();
    assert_eq!(pi["rank"], 3);
    assert_eq!(pi["n"], 2);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("rank = 3"), "{stdout}");
    assert!(dir.path().join("run.json").exists());
}

#[test]
fn active_reports_descending_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelaw(&[
        "--out",
        &out_arg(dir.path()),
        "active",
        "--model",
        "pipeflow_turbulent",
        "--quad-order",
        "5",
        "--fd-step",
        "1e-5",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = read(dir.path(), "eigenvalues.csv");
    let vals: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(vals.len(), 5);
    assert!(vals.windows(2).all(|w| w[0] >= w[1]), "{vals:?}");
    let report: serde_json::Value = serde_json::from_str(&read(dir.path(), "active.json")).unwrap();
    assert_eq!(report["points"], 3125);
    assert_eq!(report["k"], 3);
}

#[test]
fn identical_runs_give_identical_bytes_for_any_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = |dir: &Path, threads: &str| {
        vec![
            "--out".to_string(),
            out_arg(dir),
            "--threads".into(),
            threads.into(),
            "pipeflow".into(),
            "reproduce".into(),
            "--regime".into(),
            "turbulent".into(),
            "--quad-order".into(),
            "5".into(),
            "--steps".into(),
            "1e-3,1e-4,1e-5".into(),
        ]
    };
    for (dir, t) in [(a.path(), "1"), (b.path(), "4")] {
        let argv = args(dir, t);
        let out = ridgelaw(&argv.iter().map(String::as_str).collect::<Vec<_>>());
        assert_eq!(
            out.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    for name in ["eigenvalues.csv", "eigenvectors.csv", "sweep.csv"] {
        assert_eq!(read(a.path(), name), read(b.path(), name), "{name}");
    }
}

#[test]
fn run_json_suffices_to_re_execute() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelaw(&[
        "--out",
        &out_arg(dir.path()),
        "sweep",
        "--model",
        "pipeflow_laminar",
        "--steps",
        "1e-2,1e-3,1e-4",
        "--quad-order",
        "4",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let first = read(dir.path(), "sweep.csv");
    let run: serde_json::Value = serde_json::from_str(&read(dir.path(), "run.json")).unwrap();
    let argv: Vec<String> = run["argv"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    std::fs::remove_file(dir.path().join("sweep.csv")).unwrap();
    let again = Command::new(env!("CARGO_BIN_EXE_ridgelaw"))
        .args(&argv[1..])
        .output()
        .unwrap();
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(read(dir.path(), "sweep.csv"), first);
    let header = first.lines().next().unwrap();
    assert_eq!(header, "h,r2,slope_so_far");
    assert!(first.lines().nth(1).unwrap().ends_with(",nan"));
}

#[test]
fn threads_fall_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_ridgelaw"))
        .env("RIDGELAW_THREADS", "2")
        .args(["--out", &out_arg(dir.path()), "pi", "pipeflow"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let run: serde_json::Value = serde_json::from_str(&read(dir.path(), "run.json")).unwrap();
    assert_eq!(run["threads"], 2);

    let bad = Command::new(env!("CARGO_BIN_EXE_ridgelaw"))
        .env("RIDGELAW_THREADS", "many")
        .args(["--out", &out_arg(dir.path()), "pi", "pipeflow"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn pipeflow_eval_prints_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = ridgelaw(&[
        "--out",
        &out_arg(dir.path()),
        "pipeflow",
        "eval",
        "--rho",
        "1",
        "--mu",
        "1",
        "--diam",
        "0.1",
        "--eps",
        "0.001",
        "--dpdl",
        "3.2",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["regime"], "laminar");
    assert!((v["V"].as_f64().unwrap() - 1e-3).abs() < 1e-15);
    assert!((v["f"].as_f64().unwrap() * v["Re"].as_f64().unwrap() - 64.0).abs() < 1e-9);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = out_arg(dir.path());
    assert_eq!(
        ridgelaw(&["--out", &o, "frobnicate"]).status.code(),
        Some(2)
    );
    assert_eq!(
        ridgelaw(&[
            "--out",
            &o,
            "active",
            "--model",
            "pipeflow_laminar",
            "--bogus"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(ridgelaw(&["--out", &o, "active"]).status.code(), Some(2));

    let missing = dir.path().join("nope.json");
    assert_eq!(
        ridgelaw(&["--out", &o, "pi", missing.to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"units":["m"],"quantities":[{"name":"a","units":{"m":1},"range":[-1,1]}],"qoi":{"name":"b"}}"#).unwrap();
    let out = ridgelaw(&["--out", &o, "pi", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains('a'));
    // no built-in evaluator behind the plain dimensional model
    assert_eq!(
        ridgelaw(&["--out", &o, "active", "--model", "pipeflow"])
            .status
            .code(),
        Some(3)
    );

    // laminar C has rank one, so k = 2 has no spectral gap
    let out = ridgelaw(&[
        "--out",
        &o,
        "active",
        "--model",
        "pipeflow_laminar",
        "--quad-order",
        "3",
        "--k",
        "2",
    ]);
    assert_eq!(
        out.status.code(),
        Some(4),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        ridgelaw(&[
            "--out",
            &o,
            "sweep",
            "--model",
            "pipeflow_laminar",
            "--steps",
            "1e-4,1e-3"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        ridgelaw(&[
            "--out",
            &o,
            "active",
            "--model",
            "pipeflow_laminar",
            "--fd-step",
            "0"
        ])
        .status
        .code(),
        Some(2)
    );
}

#[test]
fn inclusion_of_csv_bases() {
    let dir = tempfile::tempdir().unwrap();
    let o = out_arg(dir.path());
    assert_eq!(
        ridgelaw(&["--out", &o, "pi", "pipeflow"]).status.code(),
        Some(0)
    );
    let w = dir.path().join("W.csv");
    let a = dir.path().join("A.csv");
    let out = ridgelaw(&[
        "--out",
        &o,
        "inclusion",
        "--candidate",
        w.to_str().unwrap(),
        "--enclosing",
        a.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let r: serde_json::Value = serde_json::from_str(&read(dir.path(), "inclusion.json")).unwrap();
    assert!(r["total"].as_f64().unwrap() < 1e-24);
}
