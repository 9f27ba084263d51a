use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn repset(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_repset")).args(args).output().expect("binary runs")
}

fn gen(dir: &Path, name: &str, args: &[&str]) -> PathBuf {
    let path = dir.join(name);
    let mut full = vec!["gen", "-o", path.to_str().unwrap()];
    full.extend_from_slice(args);
    let out = repset(&full);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    path
}

/// Three disjoint edges, all affordable.
fn three_edges(dir: &Path) -> PathBuf {
    let path = dir.join("three.json");
    let body = r#"{
  "version": 1,
  "elements": [
    {"id": 0, "cost": 1, "profit": 10},
    {"id": 1, "cost": 1, "profit": 10},
    {"id": 2, "cost": 1, "profit": 10}
  ],
  "constraint": {"type": "matching", "vertices": 6, "edges": {"0": [0, 1], "1": [2, 3], "2": [4, 5]}},
  "budget": 3
}"#;
    std::fs::write(&path, body).unwrap();
    path
}

#[test]
fn gen_is_seeded() {
    let a = repset(&["gen", "--seed", "7", "--size", "8"]);
    let b = repset(&["gen", "--seed", "7", "--size", "8"]);
    let c = repset(&["gen", "--seed", "8", "--size", "8"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn solve_matches_brute_force_on_small_instances() {
    let dir = tempfile::tempdir().unwrap();
    for (i, kind) in ["matching", "matroid-intersection"].iter().enumerate() {
        let path = gen(dir.path(), &format!("{i}.json"), &["--seed", "3", "--size", "9", "--kind", kind]);
        let record = |mode: &str| -> Value {
            let out = repset(&["solve", path.to_str().unwrap(), "--mode", mode, "--epsilon", "1/4", "--omit-timing"]);
            assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
            serde_json::from_slice(&out.stdout).unwrap()
        };
        let solved = record("solve");
        let brute = record("brute");
        let (p, opt) = (solved["profit"].as_u64().unwrap(), brute["profit"].as_u64().unwrap());
        assert!(4 * p >= 3 * opt, "{p} vs {opt}");
        assert!(solved.get("ms_total").map_or(true, Value::is_null));
    }
}

#[test]
fn verify_passes_on_constructed_sets() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "m.json", &["--seed", "11", "--size", "8"]);
    for property in ["exchange", "representative", "replacement", "weak-exchange", "npsolver"] {
        let out = repset(&["verify", path.to_str().unwrap(), "--property", property, "--epsilon", "1/4"]);
        assert_eq!(out.status.code(), Some(0), "{property}: {}", String::from_utf8_lossy(&out.stdout));
        let record: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(record["passed"], Value::Bool(true));
    }
}

#[test]
fn injected_bad_representative_fails_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = three_edges(dir.path());
    let out = repset(&["verify", path.to_str().unwrap(), "--property", "representative", "--epsilon", "1/10", "--inject", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let record: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(record["passed"], Value::Bool(false));
}

#[test]
fn bad_epsilon_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = three_edges(dir.path());
    for eps in ["1/1", "1/2", "x"] {
        let out = repset(&["solve", path.to_str().unwrap(), "--epsilon", eps]);
        assert_eq!(out.status.code(), Some(2), "epsilon {eps}");
    }
    assert_eq!(repset(&["solve", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(repset(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn malformed_instance_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(
        &path,
        r#"{"version": 1, "elements": [{"id": 0, "cost": 1, "profit": 1}],
            "constraint": {"type": "matching", "vertices": 2, "edges": {"0": [1, 1]}}, "budget": 1}"#,
    )
    .unwrap();
    let out = repset(&["solve", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn enumeration_cap_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let path = three_edges(dir.path());
    let out = repset(&["solve", path.to_str().unwrap(), "--mode", "eptas", "--epsilon", "1/4", "--enumeration-cap", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn brute_force_guard_exits_with_four() {
    let dir = tempfile::tempdir().unwrap();
    let path = gen(dir.path(), "big.json", &["--seed", "1", "--size", "40"]);
    let out = repset(&["solve", path.to_str().unwrap(), "--mode", "brute"]);
    assert_eq!(out.status.code(), Some(4), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn bench_on_empty_directory_writes_only_the_header() {
    let dir = tempfile::tempdir().unwrap();
    let out = repset(&["bench", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 1);
}

#[test]
fn bench_reports_one_row_per_instance_and_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus");
    let out = repset(&["gen", "--seed", "5", "--corpus", corpus.to_str().unwrap(), "--count", "2"]);
    assert!(out.status.success());
    let out = repset(&["bench", corpus.to_str().unwrap(), "--epsilon", "1/4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = reader.headers().unwrap().clone();
    let ratio = headers.iter().position(|h| h == "ratio").expect("ratio column");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[ratio].parse::<f64>().unwrap() >= 0.75));
}
