use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_fermi-dpp");

const FACTOR: &str = r#"{"type":"projection_factor","q":{"rows":2,"cols":4,"data":[
  [0.5,0],[0.5,0],[0.5,0],[0.5,0],
  [0.5,0],[-0.5,0],[0.5,0],[-0.5,0]]}}"#;

const BDG: &str = r#"{"type":"bdg",
  "m":{"rows":2,"cols":2,"data":[[1,0],[0.3,0],[0.3,0],[-0.5,0]]},
  "delta":{"rows":2,"cols":2,"data":[[0,0],[0.4,0],[-0.4,0],[0,0]]},
  "beta":1.5}"#;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(BIN).current_dir(dir).args(args).output().expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn tv(dir: &Path, a: &str, b: &str, n: &str) -> f64 {
    ok(dir, &["tv-compare", a, b, "--n-modes", n]).trim().parse().unwrap()
}

#[test]
fn schedule_compile_simulate_matches_exact_pmf() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("q.json"), FACTOR).unwrap();
    ok(d, &["schedule", "--input", "q.json", "--mode", "log-depth", "--out", "s.json"]);
    ok(d, &["compile", "--schedule", "s.json", "--out", "c.json", "--qasm", "c.qasm"]);
    assert!(fs::read_to_string(d.join("c.qasm")).unwrap().starts_with("OPENQASM 2.0;"));
    ok(d, &["simulate", "--circuit", "c.json", "--out", "sim.json"]);
    ok(d, &["exact-pmf", "--kernel", "q.json", "--out", "exact.json"]);
    assert!(tv(d, "sim.json", "exact.json", "4") < 1e-12);
}

#[test]
fn samplers_agree_with_exact_law() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("q.json"), FACTOR).unwrap();
    fs::write(d.join("bdg.json"), BDG).unwrap();
    ok(d, &["exact-pmf", "--kernel", "q.json", "--out", "exact.json"]);
    for method in ["hkpv", "mixture", "dilation", "circuit"] {
        let out = format!("{method}.csv");
        ok(d, &["sample", "--kernel", "q.json", "--method", method, "--shots", "20000", "--out", &out]);
        assert!(tv(d, &out, "exact.json", "4") < 0.02, "{method}");
    }
    ok(d, &["exact-pmf", "--kernel", "bdg.json", "--out", "bdg_exact.json"]);
    ok(d, &["sample", "--kernel", "bdg.json", "--method", "pfpp", "--shots", "20000", "--out", "pf.csv"]);
    assert!(tv(d, "pf.csv", "bdg_exact.json", "2") < 0.02);
}

#[test]
fn experiments_are_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let args = |out: &'static str| ["experiment", "projection", "--reruns", "5", "--seed", "7", "--out-dir", out];
    let first = ok(d, &args("a"));
    let second = ok(d, &args("b"));
    assert_eq!(first, second);
    for f in ["histogram.csv", "comparison.csv", "tv_null.csv"] {
        assert_eq!(fs::read(d.join("a").join(f)).unwrap(), fs::read(d.join("b").join(f)).unwrap(), "{f}");
    }
    assert_eq!(fs::read_to_string(d.join("a/tv_null.csv")).unwrap().lines().count(), 6);

    let report: serde_json::Value =
        serde_json::from_str(&ok(d, &["experiment", "projection", "--exact", "--reruns", "0"])).unwrap();
    assert!(report["tv"].as_f64().unwrap() <= 1e-9);
    let pf: serde_json::Value = serde_json::from_str(&ok(d, &["experiment", "pfpp", "--reruns", "0"])).unwrap();
    assert!(pf["tv"].as_f64().unwrap() <= 0.02);
    assert_eq!(pf["parity"]["mismatches"], 0);
}

#[test]
fn bad_inputs_fail_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("bad.json"), r#"{"type":"hermitian","k":{"rows":2,"cols":2,"data":[[2,0],[0,0],[0,0],[0.5,0]]}}"#)
        .unwrap();
    let out = run(d, &["validate-kernel", "--kernel", "bad.json"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
    fs::write(d.join("q.json"), FACTOR).unwrap();
    assert!(!run(d, &["sample", "--kernel", "q.json", "--method", "pfpp"]).status.success());
    assert!(!run(d, &["sample", "--kernel", "q.json", "--method", "hkpv", "--noise", "0.1"]).status.success());
    assert!(!run(d, &["schedule", "--input", "q.json", "--mode", "graph"]).status.success());
}
