use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sparsepoly"))
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> (i32, Value, Output) {
    let out = bin().args(args).output().unwrap();
    let json = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), json, out)
}

// small parameters keep each run well under a second
const FAST: [&str; 6] = ["--r", "32", "--bigM", "3000", "--m", "50"];

#[test]
fn test_accepts_sparse_polynomial() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "c.poly", "# x1 x2 + x3 x4 x5\nn=24\n1 2\n3 4 5\n");
    let mut args = vec!["test", "--poly", poly.to_str().unwrap(), "--s", "3", "--eps", "0.1", "--seed", "3"];
    args.extend(FAST);
    let (code, v, _) = run(&args);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outcome"], "accept");
    assert_eq!(v["high_count"], 5);
}

#[test]
fn test_output_is_deterministic_and_written_to_file() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "c.poly", "n=16\n1 2\n3 4 5\n");
    let out = dir.path().join("v.json");
    let mut args = vec!["test", "--poly", poly.to_str().unwrap(), "--s", "3", "--seed", "11", "--json", out.to_str().unwrap()];
    args.extend(FAST);
    let (_, a, first) = run(&args);
    let (_, b, second) = run(&args);
    assert_eq!(a, b);
    assert_eq!(first.stdout, second.stdout);
    let saved: Value = serde_json::from_str(&fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(saved, a);
}

#[test]
fn test_rejects_far_table() {
    let dir = TempDir::new().unwrap();
    // inner product x1x2 + x3x4 + x5x6 is far from every 1-sparse polynomial
    let bits: String = (0u32..64)
        .map(|x| {
            let b = |i: u32| x >> i & 1;
            if (b(0) & b(1)) ^ (b(2) & b(3)) ^ (b(4) & b(5)) == 1 { '1' } else { '0' }
        })
        .collect();
    let table = write(dir.path(), "ip.tt", &format!("n=6\n{bits}\n"));
    let mut args = vec!["test", "--table", table.to_str().unwrap(), "--s", "1", "--eps", "0.25"];
    args.extend(FAST);
    let (code, v, _) = run(&args);
    assert_eq!(code, 1, "{v}");
    assert_eq!(v["outcome"], "reject");
    assert!(v["reason"].is_string());
}

#[test]
fn exact_backend_has_no_estimation_queries() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "c.poly", "n=12\n1 2\n3 4 5\n");
    let (code, v, _) = run(&["test", "--poly", poly.to_str().unwrap(), "--s", "3", "--exact-backend", "--r", "1024"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["exact_backend"], true);
    assert_eq!(v["ledger"]["estimation"], 0);
}

#[test]
fn errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let missing = dir.path().join("missing.poly");
    let (code, _, out) = run(&["test", "--poly", missing.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.poly"));

    let bad = write(dir.path(), "bad.poly", "n=3\n1 7\n");
    let (code, _, out) = run(&["test", "--poly", bad.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("outside"));

    let (code, _, _) = run(&["test"]);
    assert_eq!(code, 2);

    // the theory profile needs about 1e18 estimation queries
    let ok = write(dir.path(), "ok.poly", "n=8\n1 2\n");
    let (code, _, out) = run(&["test", "--poly", ok.to_str().unwrap(), "--profile", "theory"]);
    assert_eq!(code, 2, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn learn_recovers_polynomial() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "p.poly", "n=10\n1 2\n3 4 5\n9\n");
    let (code, v, _) = run(&["learn", "--poly", poly.to_str().unwrap(), "--s", "3", "--seed", "5"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["hypothesis"], "n=10\n1 2\n3 4 5\n9\n");
}

#[test]
fn learn_reports_not_sparse() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "p.poly", "n=6\n1\n2\n3\n4\n");
    let (code, v, _) = run(&["learn", "--poly", poly.to_str().unwrap(), "--s", "2"]);
    assert_eq!(code, 1);
    assert_eq!(v["outcome"]["result"], "not-sparse");
}

#[test]
fn distance_reports_exact_values() {
    let dir = TempDir::new().unwrap();
    let a = write(dir.path(), "a.poly", "n=4\n1 2\n");
    let b = write(dir.path(), "b.poly", "n=4\n1\n");
    let (code, v, _) =
        run(&["distance", "--poly", a.to_str().unwrap(), "--other-poly", b.to_str().unwrap(), "--class-s", "0"]);
    assert_eq!(code, 0);
    // x1 x2 vs x1 disagree where x1 = 1, x2 = 0
    assert_eq!(v["other_distance"], 0.25);
    assert_eq!(v["class_distance"], 0.25);
    assert_eq!(v["zero_fraction"], 0.75);
}

#[test]
fn verify_suites() {
    let (code, v, _) = run(&["verify", "--suite", "detection", "--trials", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v[0]["suite"], "detection");
    assert_eq!(v[0]["failures"].as_array().unwrap().len(), 0);

    let (code, v, _) = run(&["verify", "--trials", "2"]);
    assert_eq!(code, 0);
    assert_eq!(v.as_array().unwrap().len(), 5);

    let (code, _, _) = run(&["verify", "--suite", "nope"]);
    assert_eq!(code, 2);
}

#[test]
fn experiments() {
    let mut args = vec!["experiment", "completeness", "--n", "16", "--s", "3", "--trials", "4", "--seed", "2"];
    args.extend(FAST);
    let (code, v, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["trials"], 4);
    assert_eq!(v["verdicts"].as_array().unwrap().len(), 4);

    let mut args = vec!["experiment", "soundness", "--n", "6", "--s", "1", "--eps", "0.25", "--trials", "3", "--summary"];
    args.extend(FAST);
    let (code, v, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["family"]["kind"], "far-table");
    assert!(v["verdicts"].as_array().unwrap().is_empty());

    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("rows.csv");
    let mut args =
        vec!["experiment", "query-scaling", "--n", "16,32", "--s", "3", "--trials", "2", "--summary", "--csv", csv.to_str().unwrap()];
    args.extend(FAST);
    let (code, v, _) = run(&args);
    assert_eq!(code, 0);
    assert_eq!(v["points"].as_array().unwrap().len(), 2);
    // header plus two trials at each n
    assert_eq!(fs::read_to_string(csv).unwrap().lines().count(), 5);
}

#[test]
fn audit_summary() {
    let dir = TempDir::new().unwrap();
    let poly = write(dir.path(), "c.poly", "n=12\n1 2\n3 4 5\n");
    let (code, v, _) =
        run(&["audit", "--poly", poly.to_str().unwrap(), "--s", "3", "--r", "6", "--alpha", "0.125", "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(v["trials"], 20);
    assert_eq!(v["holds"].as_array().unwrap().len(), 6);
}
