use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn scenario(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn ncvar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncvar"))
        .args(args)
        .env("NCVAR_THREADS", "2")
        .output()
        .expect("spawn ncvar")
}

fn records(out: &Output) -> Vec<Value> {
    String::from_utf8_lossy(&out.stdout)
        .lines()
        .map(|l| serde_json::from_str(l).expect("ndjson line"))
        .collect()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn pauli_fixture_passes() {
    let out = ncvar(&["check", scenario("pauli_sum.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let recs = records(&out);
    assert_eq!(recs.len(), 14);
    let es = recs.iter().find(|r| r["name"] == "efron_stein").unwrap();
    assert!((es["lhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(es["slack"].as_f64().unwrap().abs() < 1e-9);
}

#[test]
fn literal_reuse_fixture_is_not_applicable() {
    let out = ncvar(&["check", scenario("literal_reuse.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let recs = records(&out);
    assert_eq!(recs.len(), 1);
    assert_eq!(recs[0]["verdict"], "not_applicable");
    assert_eq!(recs[0]["realization"], "literal_reuse");
}

#[test]
fn malformed_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"name": "x", "shape": [2], "locals": [], "f": "x1", "checks": [{"kind": "nope"}]}"#,
    )
    .unwrap();
    let out = ncvar(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("checks[0]"), "{err}");

    let missing = dir.path().join("missing.json");
    assert_eq!(code(&ncvar(&["check", missing.to_str().unwrap()])), 2);
}

#[test]
fn shape_mismatch_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("mismatch.json");
    std::fs::write(
        &path,
        r#"{"name": "m", "shape": [3], "locals": [[[[1,0],[0,0]],[[0,0],[1,0]]]], "f": "x1", "checks": [{"kind": "trace_jensen"}]}"#,
    )
    .unwrap();
    assert_eq!(code(&ncvar(&["check", path.to_str().unwrap()])), 2);
}

#[test]
fn too_few_samples_is_an_input_error() {
    let out = ncvar(&[
        "mc",
        scenario("rademacher_sum.json").to_str().unwrap(),
        "--n-samples",
        "10",
    ]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("too few samples"));
}

#[test]
fn tol_is_rejected_for_mc() {
    let out = ncvar(&["mc", scenario("rademacher_sum.json").to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn mc_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let file = scenario("matrix_diagonal.json");
    let a = dir.path().join("a.ndjson");
    let b = dir.path().join("b.ndjson");
    for (path, threads) in [(&a, "1"), (&b, "3")] {
        let out = Command::new(env!("CARGO_BIN_EXE_ncvar"))
            .args([
                "mc",
                file.to_str().unwrap(),
                "--n-samples",
                "5000",
                "--out",
                path.to_str().unwrap(),
            ])
            .env("NCVAR_THREADS", threads)
            .output()
            .unwrap();
        assert_eq!(code(&out), 0);
    }
    let (a, b) = (std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn mc_seed_override_changes_estimates() {
    let file = scenario("rademacher_sum.json");
    let a = ncvar(&["mc", file.to_str().unwrap(), "--n-samples", "1000", "--seed", "1"]);
    let b = ncvar(&["mc", file.to_str().unwrap(), "--n-samples", "1000", "--seed", "2"]);
    assert_eq!((code(&a), code(&b)), (0, 0));
    assert_ne!(a.stdout, b.stdout);
    let recs = records(&a);
    assert_eq!(recs[0]["estimators"][0]["seed"], 1);
    assert_eq!(recs[0]["estimators"][0]["n_samples"], 1000);
}

#[test]
fn suite_counts_are_pinned() {
    let out = ncvar(&["suite", "--fuzz-count", "20", "--format", "csv-summary"]);
    assert_eq!(code(&out), 0);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.starts_with("name,total,holds,not_applicable,violated,errors\n"));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(" 0 violated, 0 errors"), "{err}");

    let a = ncvar(&["suite", "--fuzz-count", "20"]);
    let b = ncvar(&["suite", "--fuzz-count", "20"]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(records(&a).len(), 471);
    assert!(records(&a).iter().all(|r| r["verdict"] != "violated"));
}

#[test]
fn tiny_tolerance_fails_the_suite() {
    let out = ncvar(&["suite", "--fuzz-count", "5", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAILED"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&ncvar(&["suite", "--max-factors", "0"])), 2);
    assert_eq!(code(&ncvar(&["suite", "--tol", "-1"])), 2);
    assert_eq!(code(&ncvar(&["bogus"])), 2);
    assert_eq!(code(&ncvar(&["--help"])), 0);
}
