use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairgame"))
}

fn model(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../models").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = bin()
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn validator() -> jsonschema::Validator {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("schemas/solution.schema.json");
    let schema: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::validator_for(&schema).unwrap()
}

#[test]
fn solve_g1() {
    let o = run(&["solve", model("g1.fgg").to_str().unwrap()]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["values"]["0"], 1.0);
    assert_eq!(v["sigma2"]["1"], 2);
    assert!(validator().is_valid(&v));
}

#[test]
fn check_reports_non_stopping_but_succeeds() {
    let o = run(&["check", model("g3.fgg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["stopping_under_fairness"], false);
    assert_eq!(v["witness"], serde_json::json!([0, 1]));
}

#[test]
fn solve_refuses_non_stopping_with_exit_2() {
    let o = run(&["solve", model("g3.fgg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["stopping_under_fairness"], false);
}

#[test]
fn generated_model_pipes_into_solve() {
    let gen = run(&["gen", "roborta", "--width", "4", "--length", "4", "--version", "A", "--p", "0.1", "--seed", "7"]);
    assert!(gen.status.success());
    let o = run_stdin(&["solve", "-"], &gen.stdout);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    assert_eq!(v["converged"], true);
    assert!(validator().is_valid(&v));
}

#[test]
fn schema_accepts_generated_solutions() {
    let schema = validator();
    for args in [
        vec!["gen", "uav", "--seed", "3"],
        vec!["gen", "uav", "--layout", "six", "--d", "0.5", "--s", "0.3"],
        vec!["gen", "roborta", "--version", "c", "--q", "0.2", "--seed", "2"],
    ] {
        let gen = run(&args);
        assert!(gen.status.success());
        let v = json(&run_stdin(&["solve", "-"], &gen.stdout));
        let errors: Vec<String> = schema.iter_errors(&v).map(|e| e.to_string()).collect();
        assert!(errors.is_empty(), "{args:?}: {errors:?}");
    }
}

#[test]
fn schema_rejects_missing_keys() {
    let mut v = json(&run(&["solve", model("g2.fgg").to_str().unwrap()]));
    v.as_object_mut().unwrap().remove("refined");
    assert!(!validator().is_valid(&v));
}

#[test]
fn output_is_deterministic() {
    let gen = run(&["gen", "roborta", "--width", "6", "--length", "5", "--version", "b", "--q", "0.1", "--seed", "4"]);
    let a = run_stdin(&["solve", "-", "--threads", "1"], &gen.stdout);
    let b = run_stdin(&["solve", "-", "--threads", "3"], &gen.stdout);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let s1 = run_stdin(&["simulate", "-", "--episodes", "500", "--seed", "9"], &gen.stdout);
    let s2 = run_stdin(&["simulate", "-", "--episodes", "500", "--seed", "9", "--threads", "2"], &gen.stdout);
    assert_eq!(s1.stdout, s2.stdout);
}

#[test]
fn simulate_reuses_solved_strategies() {
    let dir = tempfile::tempdir().unwrap();
    let sol = dir.path().join("g1.json");
    let g1 = model("g1.fgg");
    let o = run(&["solve", g1.to_str().unwrap(), "-o", sol.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let o = run(&["simulate", g1.to_str().unwrap(), "--strategies", sol.to_str().unwrap(), "--episodes", "50"]);
    assert!(o.status.success());
    let v = json(&o);
    assert_eq!(v["mean"], 1.0);
    assert_eq!(v["stderr"], 0.0);
    assert_eq!(v["episodes"], 50);
    assert_eq!(v["termination_rate"], 1.0);
}

#[test]
fn game_json_is_accepted_as_input() {
    let gen = run(&["gen", "uav", "--waypoints", "3", "--seed", "5", "--json"]);
    assert!(gen.status.success());
    let from_json = run_stdin(&["solve", "-"], &gen.stdout);
    let text = run(&["gen", "uav", "--waypoints", "3", "--seed", "5"]);
    let from_text = run_stdin(&["solve", "-"], &text.stdout);
    assert!(from_json.status.success());
    assert_eq!(from_json.stdout, from_text.stdout);
}

#[test]
fn oracle_matches_solve_on_g1() {
    let g1 = model("g1.fgg");
    let oracle = json(&run(&["oracle", g1.to_str().unwrap()]));
    let solved = json(&run(&["solve", g1.to_str().unwrap()]));
    assert_eq!(oracle["values"], solved["values"]);
}

#[test]
fn exit_codes() {
    let bad = run_stdin(&["solve", "-"], b"module m x : [0..1] init 0; [a] x=0 -> (x'=2); endmodule");
    assert_eq!(bad.status.code(), Some(1));
    assert!(!bad.stderr.is_empty());

    let missing = run(&["check", "/nonexistent/model.fgg"]);
    assert_eq!(missing.status.code(), Some(1));

    let slow = run(&["solve", model("g2.fgg").to_str().unwrap(), "--max-iters", "0"]);
    assert_eq!(slow.status.code(), Some(3));
    assert_eq!(json(&slow)["converged"], false);

    let gen = run(&["gen", "roborta", "--width", "8", "--length", "8"]);
    let big = run_stdin(&["check", "-", "--max-vertices", "10"], &gen.stdout);
    assert_eq!(big.status.code(), Some(4));

    let gen = run(&["gen", "roborta", "--width", "5", "--length", "5"]);
    let oracle = run_stdin(&["oracle", "-"], &gen.stdout);
    assert_eq!(oracle.status.code(), Some(4));

    assert_eq!(run(&["solve", "x.fgg", "--epsilon", "0"]).status.code(), Some(1));
    assert_eq!(run(&["simulate", "x.fgg", "--episodes", "0"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn inspect_counts_classes() {
    let o = run(&["inspect", model("g1.fgg").to_str().unwrap(), "--json"]);
    let v = json(&o);
    assert_eq!(v["vertices"], 3);
    assert_eq!(v["max"], 1);
    assert_eq!(v["min"], 1);
    assert_eq!(v["terminals"], serde_json::json!([2]));
}
