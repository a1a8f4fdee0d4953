//! End-to-end checks of the `nodal-lab` binary: flag grammar, exit codes,
//! artifact hashing, and byte-level reproducibility.

use std::path::Path;
use std::process::{Command, Output};

fn nodal_lab() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_nodal-lab"));
    cmd.env_remove("NODAL_LAB_WORKERS");
    cmd
}

fn run(args: &[&str]) -> Output {
    nodal_lab().args(args).output().expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).expect("stdout is UTF-8")
}

#[test]
fn lattice_prints_the_point_count_and_fourth_moment() {
    let out = run(&["lattice", "--m", "2917"]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    assert!(line.contains("r2=8"), "{line}");
    assert!(line.contains("nu4_hat="), "{line}");
}

#[test]
fn validation_failures_exit_one_and_name_the_problem() {
    let out = run(&["moments", "--measure", "nonsense", "--u", "0", "--L", "5", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("nonsense"), "{err}");

    // clap-level failure: missing required flag
    let out = run(&["moments", "--measure", "cilleruelo"]);
    assert_eq!(out.status.code(), Some(1));

    // no subcommand at all
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));

    // resolution below the floor
    let out = run(&[
        "sample", "--measure", "cilleruelo", "--resolution", "16", "--out", "/tmp/x.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn kacrice_reports_the_degenerate_branch_on_the_diagonal() {
    let out = run(&["kacrice", "--measure", "lattice:1", "--u", "0.7853981634", "--L", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let line = stdout(&out);
    assert!(line.contains("degenerate="), "{line}");
    let ratio: f64 = line
        .split("ratio=")
        .nth(1)
        .and_then(|s| s.trim().parse().ok())
        .unwrap();
    assert!((ratio - 1.0).abs() < 1e-6, "numeric/asymptotic should be ~1: {line}");
}

#[test]
fn kacrice_numerical_failures_exit_two() {
    // lattice:1 along the axis: the covariance returns to 1 every period, so
    // the second-moment quadrature must refuse.
    let out = run(&["kacrice", "--measure", "lattice:1", "--u", "0", "--L", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn persistence_csv_matches_the_axis_law_and_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("persistence.csv");
    let out = run(&[
        "persistence", "--measure", "cilleruelo", "--u", "0", "--L", "10",
        "--samples", "2000", "--seed", "7", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("L,persistence,se,upper_bound"));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row[0], "10");
    let p: f64 = row[1].parse().unwrap();
    assert!((p - 0.2929).abs() < 0.04, "persistence {p}");

    let verify = run(&["--verify", csv.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0), "{}", String::from_utf8_lossy(&verify.stderr));
    assert!(stdout(&verify).contains("data hash ok"));

    // Any edit to the table must break verification.
    std::fs::write(&csv, text.replace("10,", "11,")).unwrap();
    let verify = run(&["--verify", csv.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(2));
}

#[test]
fn moments_json_verifies_and_is_worker_count_independent() {
    let dir = tempfile::tempdir().unwrap();
    let run_with = |workers: &str, name: &str| -> (String, Vec<u8>) {
        let path = dir.path().join(name);
        let out = run(&[
            "--workers", workers, "moments", "--measure", "lattice:25",
            "--u", "0.3", "--L", "6", "--samples", "400", "--seed", "3",
            "--out", path.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (stdout(&out), std::fs::read(&path).unwrap())
    };
    let (line1, file1) = run_with("1", "w1.json");
    let (line4, file4) = run_with("4", "w4.json");
    assert_eq!(line1, line4, "summary lines must not depend on --workers");
    assert_eq!(file1, file4, "artifacts must not depend on --workers");

    let verify = run(&["--verify", dir.path().join("w1.json").to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));

    // The env fallback behaves like the flag.
    let path = dir.path().join("env.json");
    let out = nodal_lab()
        .env("NODAL_LAB_WORKERS", "2")
        .args([
            "moments", "--measure", "lattice:25", "--u", "0.3", "--L", "6",
            "--samples", "400", "--seed", "3", "--out", path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&path).unwrap(), file1);

    let bad = nodal_lab()
        .env("NODAL_LAB_WORKERS", "zero")
        .args(["lattice", "--m", "25"])
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn sample_emits_a_grid_with_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("grid.csv");
    let out = run(&[
        "sample", "--measure", "lattice:2917", "--resolution", "32",
        "--seed", "1", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));

    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,y,value"));
    assert_eq!(lines.count(), 32 * 32);
    assert!(Path::new(&format!("{}.meta.json", csv.display())).exists());

    let verify = run(&["--verify", csv.to_str().unwrap()]);
    assert_eq!(verify.status.code(), Some(0));
}

#[test]
fn coupled_sample_emits_both_fields() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pair.csv");
    let out = run(&[
        "sample", "--coupled", "--eps", "0.05", "--m-pairs", "4",
        "--resolution", "32", "--out", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y,g,f\n"));
    // g and f stay close pointwise on this small window.
    for line in text.lines().skip(1).step_by(97) {
        let v: Vec<f64> = line.split(',').map(|s| s.parse().unwrap()).collect();
        assert!((v[2] - v[3]).abs() < 2.0 * 0.05 * 18.0, "{line}");
    }
}

#[test]
fn coupling_transfer_runs_clean_and_reproducibly() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("transfer.json");
    let args = [
        "coupling", "transfer", "--eps", "0.001", "--m-pairs", "2", "--u", "0",
        "--L", "10", "--samples", "300", "--seed", "2",
        "--out", json_path.to_str().unwrap(),
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let line = stdout(&out);
    assert!(line.contains("violations=0"), "{line}");

    let first = std::fs::read(&json_path).unwrap();
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(std::fs::read(&json_path).unwrap(), first, "same seed, same bytes");

    // Out-of-regime requests are validation errors.
    let out = run(&[
        "coupling", "transfer", "--eps", "0.001", "--m-pairs", "2", "--u", "0.3",
        "--L", "10", "--samples", "10",
    ]);
    assert_eq!(out.status.code(), Some(1));
}
