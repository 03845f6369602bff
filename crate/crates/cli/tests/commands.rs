use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const ORACLE_EXAMPLE: &str = r#"{
  "bin": {"w": "1", "h": "1"},
  "items": [
    {"id": "big", "side": "0.6", "profit": "10"},
    {"id": "l", "side": "0.5", "profit": "6"},
    {"id": "r", "side": "0.5", "profit": "6"}
  ],
  "epsilon": "1/8"
}"#;

const GRID_EXAMPLE: &str = r#"{
  "bin": {"w": "1", "h": "1"},
  "items": [
    {"id": "a", "side": "1/2", "profit": "4"},
    {"id": "b", "side": "1/2", "profit": "3"},
    {"id": "c", "side": "1/2", "profit": "2"},
    {"id": "d", "side": "1/2", "profit": "1"}
  ]
}"#;

const EMPTY: &str = r#"{"bin": {"w": "1", "h": "1"}, "items": []}"#;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_squareknap"))
        .args(args)
        .env_remove("SQUAREKNAP_THREADS")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn exact_solves_oracle_example() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", ORACLE_EXAMPLE);
    let out = dir.path().join("p.json");
    let o = run(&["solve", "--algo", "exact", "--in", s(&inst), "--out", s(&out)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc = json(&out);
    assert_eq!(doc["profit"], "12");
    assert_eq!(doc["feasible"], true);
    assert_eq!(doc["status"], "optimal");
    assert_eq!(doc["placements"].as_array().unwrap().len(), 2);
}

#[test]
fn greedy_fills_grid() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", GRID_EXAMPLE);
    let o = run(&["solve", "--algo", "greedy", "--in", s(&inst)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["profit"], "10");
    assert_eq!(doc["placements"].as_array().unwrap().len(), 4);
}

#[test]
fn empty_instance_every_algorithm() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", EMPTY);
    for algo in ["greedy", "nfdh", "a1", "a2", "exact", "corner-exact"] {
        let o = run(&["solve", "--algo", algo, "--in", s(&inst)]);
        assert_eq!(code(&o), 0, "{algo}: {}", stderr(&o));
        let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["profit"], "0", "{algo}");
        assert!(doc["placements"].as_array().unwrap().is_empty());
    }
}

#[test]
fn solve_output_verifies_and_renders() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("gen.json");
    let o = run(&["gen", "--seed", "11", "--n", "6", "--family", "bimodal", "--out", s(&inst)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    for algo in ["greedy", "nfdh", "a1", "a2", "exact"] {
        let pk = dir.path().join(format!("{algo}.json"));
        let o = run(&["solve", "--algo", algo, "--in", s(&inst), "--out", s(&pk)]);
        assert_eq!(code(&o), 0, "{algo}: {}", stderr(&o));
        assert_eq!(json(&pk)["algorithm"], algo);
        let v = run(&["verify", "--in", s(&inst), "--packing", s(&pk)]);
        assert_eq!(code(&v), 0, "{algo}: {}", stderr(&v));
        let svg1 = dir.path().join(format!("{algo}1.svg"));
        let svg2 = dir.path().join(format!("{algo}2.svg"));
        assert_eq!(code(&run(&["render", "--in", s(&inst), "--packing", s(&pk), "--out", s(&svg1)])), 0);
        assert_eq!(code(&run(&["render", "--in", s(&inst), "--packing", s(&pk), "--out", s(&svg2)])), 0);
        let a = fs::read(&svg1).unwrap();
        assert_eq!(a, fs::read(&svg2).unwrap());
        let n = json(&pk)["placements"].as_array().unwrap().len();
        assert_eq!(String::from_utf8(a).unwrap().matches("class=\"item\"").count(), n);
    }
}

#[test]
fn a2_reports_branch() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", ORACLE_EXAMPLE);
    let o = run(&["solve", "--algo", "a2", "--in", s(&inst)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!(doc["branch"].is_string());
    assert_eq!(doc["profit"], "12");
    assert!(stderr(&o).contains("branch"));
}

#[test]
fn verify_reports_violations() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", ORACLE_EXAMPLE);
    let overlap = write(
        &dir,
        "o.json",
        r#"{"placements":[{"id":"l","x":"0","y":"0"},{"id":"r","x":"1/4","y":"1/4"}],"profit":"12","feasible":true}"#,
    );
    let o = run(&["verify", "--in", s(&inst), "--packing", s(&overlap)]);
    assert_eq!(code(&o), 1);
    let msg = stderr(&o);
    assert!(msg.contains("`l`") && msg.contains("`r`"), "{msg}");

    let outside = write(&dir, "x.json", r#"{"placements":[{"id":"big","x":"1/2","y":"0"}],"profit":"10","feasible":true}"#);
    let o = run(&["verify", "--in", s(&inst), "--packing", s(&outside)]);
    assert_eq!(code(&o), 1);
    assert!(stderr(&o).contains("big"));

    let svg = dir.path().join("o.svg");
    let o = run(&["render", "--in", s(&inst), "--packing", s(&overlap), "--out", s(&svg)]);
    assert_eq!(code(&o), 1);
    assert!(!svg.exists());
}

#[test]
fn input_errors_exit_two_without_output() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let missing = dir.path().join("missing.json");
    let o = run(&["solve", "--algo", "a2", "--in", s(&missing), "--out", s(&out)]);
    assert_eq!(code(&o), 2);

    let bad = write(&dir, "bad.json", r#"{"bin": {"w": 1, "h": "1"}, "items": []}"#);
    let o = run(&["solve", "--algo", "greedy", "--in", s(&bad), "--out", s(&out)]);
    assert_eq!(code(&o), 2);

    let inst = write(&dir, "i.json", ORACLE_EXAMPLE);
    let o = run(&["solve", "--algo", "a1", "--in", s(&inst), "--epsilon", "1/2", "--out", s(&out)]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("epsilon"));

    let o = run(&["solve", "--algo", "simplex", "--in", s(&inst)]);
    assert_eq!(code(&o), 2);

    let unknown = write(&dir, "u.json", r#"{"placements":[{"id":"zz","x":"0","y":"0"}],"profit":"0","feasible":true}"#);
    let o = run(&["verify", "--in", s(&inst), "--packing", s(&unknown)]);
    assert_eq!(code(&o), 2);
    assert!(!out.exists());
}

#[test]
fn schedule_file_is_honoured() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", GRID_EXAMPLE);
    let sched = write(&dir, "s.json", r#"{"base": "1/4", "growth": 3}"#);
    let o = run(&["solve", "--algo", "a2", "--in", s(&inst), "--epsilon", "1/8", "--schedule", s(&sched)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let broken = write(&dir, "b.json", r#"{"base": "2", "growth": 3}"#);
    let o = run(&["solve", "--algo", "a2", "--in", s(&inst), "--schedule", s(&broken)]);
    assert_eq!(code(&o), 2);
}

#[test]
fn incomplete_oracle_exits_three_with_labelled_output() {
    let dir = TempDir::new().unwrap();
    let inst = dir.path().join("gen.json");
    assert_eq!(code(&run(&["gen", "--seed", "3", "--n", "8", "--family", "uniform", "--out", s(&inst)])), 0);
    let out = dir.path().join("p.json");
    let o = Command::new(env!("CARGO_BIN_EXE_squareknap"))
        .args(["solve", "--algo", "corner-exact", "--in", s(&inst), "--out", s(&out)])
        .output()
        .unwrap();
    // this instance needs far more corner packings than the default limit
    assert_eq!(code(&o), 3, "{}", stderr(&o));
    let doc = json(&out);
    assert_eq!(doc["status"], "incomplete");
    assert_eq!(doc["feasible"], true);
}

#[test]
fn gen_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert_eq!(code(&run(&["gen", "--seed", "5", "--n", "9", "--family", "adversarial", "--out", s(p)])), 0);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
    assert_eq!(json(&a)["items"].as_array().unwrap().len(), 9);
}

#[test]
fn bench_writes_identical_csv() {
    let dir = TempDir::new().unwrap();
    let corpus = write(
        &dir,
        "c.json",
        r#"{"seed": 1, "per_cell": 2, "n": [4], "families": ["uniform", "adversarial"],
            "algorithms": ["greedy", "a2", "exact"], "epsilon": "1/8"}"#,
    );
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = run(&["bench", "--corpus", s(&corpus), "--out", s(&a)]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    assert!(String::from_utf8_lossy(&o.stdout).contains("a2"));
    let o = Command::new(env!("CARGO_BIN_EXE_squareknap"))
        .args(["bench", "--corpus", s(&corpus), "--out", s(&b)])
        .env("SQUAREKNAP_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let csv = fs::read_to_string(&a).unwrap();
    assert_eq!(csv, fs::read_to_string(&b).unwrap());
    assert!(csv.starts_with("seed,n,algorithm,profit,opt,ratio,nodes,ms\n"));
    assert_eq!(csv.lines().count(), 1 + 4 * 3);
}

#[test]
fn bad_thread_count_is_rejected() {
    let dir = TempDir::new().unwrap();
    let inst = write(&dir, "i.json", EMPTY);
    let o = Command::new(env!("CARGO_BIN_EXE_squareknap"))
        .args(["solve", "--algo", "greedy", "--in", s(&inst)])
        .env("SQUAREKNAP_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
}
