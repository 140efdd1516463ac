use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const Q3: &str = r#"{"p": 3, "f": 1, "residue_min_poly": [0, 1], "eisenstein": [-3, 1], "precision": 6}"#;
const Q3_RAMIFIED: &str = r#"{"p": 3, "f": 1, "residue_min_poly": [0, 1], "eisenstein": [-3, 0, 1], "precision": 6}"#;
const F9: &str = r#"{"p": 3, "f": 2, "residue_min_poly": [1, 0, 1], "eisenstein": [-3, 1], "precision": 6}"#;

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn crystal(dir: &Path, name: &str, ring: &str, rank: usize, matrix: &str) -> PathBuf {
    write(dir, name, &format!(r#"{{"ring": {ring}, "rank": {rank}, "matrix": {matrix}}}"#))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prismkit")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn json_of(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

#[test]
fn zero_crystal_passes() {
    let dir = TempDir::new().unwrap();
    let c = crystal(dir.path(), "zero.json", Q3, 1, "[[0]]");
    let o = run(&["check", "--crystal", c.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

#[test]
fn x_over_f9_fails_check() {
    let dir = TempDir::new().unwrap();
    let c = crystal(dir.path(), "x.json", F9, 1, "[[[0, 1]]]");
    let o = run(&["--json", "check", "--crystal", c.to_str().unwrap()]);
    assert_eq!(code(&o), 1);
    let v = json_of(&o);
    assert_eq!(v["result"]["nilpotency"]["verdict"], "residue_obstruction");
    assert_eq!(v["passed"], false);
    let o = run(&["weights-check", "--crystal", c.to_str().unwrap(), "--weights", "0"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn malformed_input_is_exit_2() {
    let dir = TempDir::new().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"ring\": {\"p\": 3,\n");
    let o = run(&["check", "--crystal", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.json:2:"), "{err}");

    let o = run(&["check", "--crystal", dir.path().join("absent.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);

    let c = crystal(dir.path(), "shape.json", Q3, 2, "[[0]]");
    assert_eq!(code(&run(&["check", "--crystal", c.to_str().unwrap()])), 2);

    let c = crystal(dir.path(), "zero.json", Q3, 1, "[[0]]");
    let o = run(&["galois-cocycle", "--crystal", c.to_str().unwrap(), "--g", "tau^"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn json_report_shape() {
    let dir = TempDir::new().unwrap();
    let c = crystal(dir.path(), "r.json", Q3_RAMIFIED, 2, "[[[0, 1], 3], [0, [3, 1]]]");
    let path = c.to_str().unwrap();
    let o = run(&["--json", "check", "--crystal", path]);
    assert_eq!(code(&o), 0);
    let v = json_of(&o);
    assert_eq!(v["schema"], "prismkit.report.v1");
    assert_eq!(v["inputs"][0]["sha256"].as_str().unwrap().len(), 64);
    assert_eq!(v["checks"].as_array().unwrap().len(), 3);
    assert!(v["elapsed_ms"].is_u64());

    for args in [
        vec!["--json", "stratify", "--crystal", path, "--degree", "4"],
        vec!["--json", "cohomology", "--crystal", path, "--degree", "5", "--preimage-s", "2", "--samples", "2"],
        vec!["--json", "galois-cocycle", "--crystal", path, "--g", "tau^2*gamma", "--lambda-degree", "5"],
        vec!["--json", "weights-check", "--crystal", path, "--weights", "0,1"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 0, "{args:?}: {}", String::from_utf8_lossy(&o.stdout));
        assert_eq!(json_of(&o)["passed"], true);
    }
}

#[test]
fn qcalc_and_fl() {
    let dir = TempDir::new().unwrap();
    let ring = write(dir.path(), "ring.json", Q3);
    let o = run(&["--json", "qcalc-verify", "--ring", ring.to_str().unwrap(), "--h-max", "2", "--u-cap", "10", "--m-cap", "5"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(json_of(&o)["result"]["dq_powers"].as_array().unwrap().len(), 2);

    let n = write(dir.path(), "n.json", "[[0, [1, 2], 3], [0, 0, [0, 1]], [0, 0, 0]]");
    let o = run(&["--json", "fl-check", "--p", "5", "--weights", "0,2,5", "--matrix", n.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert!(json_of(&o)["result"]["nilpotency_index"].as_u64().unwrap() <= 3);

    // weight above p is rejected as input
    let o = run(&["fl-check", "--p", "3", "--weights", "0,2,5", "--matrix", n.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
}

#[test]
fn selftest_is_deterministic() {
    let strip = |o: &Output| {
        let mut v = json_of(o);
        v.as_object_mut().unwrap().remove("elapsed_ms");
        v
    };
    let args = ["--json", "selftest", "--seed", "42", "--only", "1,10,11"];
    let a = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stdout));
    let b = Command::new(env!("CARGO_BIN_EXE_prismkit")).args(args).env("PRISMKIT_THREADS", "1").output().unwrap();
    assert_eq!(strip(&a), strip(&b));
    assert_eq!(json_of(&a)["checks"].as_array().unwrap().len(), 3);
}
