use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value as Json;

fn detpar(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_detpar"))
        .args(args)
        .env("MDL_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exited normally")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn sisafe_dumas_holds() {
    let o = detpar(&["sisafe", "dumas.mdl", "--arg", "1844", "--format", "json"]);
    assert_eq!(code(&o), 0);
    let r = json(&o);
    assert_eq!(r["verdict"]["kind"], "Holds");
    assert_eq!(r["limits_hit"], Json::Null);
    assert_eq!(r["witness_traces"].as_array().unwrap().len(), 1);
}

#[test]
fn sisafe_dumas_zero_is_vacuous() {
    let o = detpar(&["sisafe", "dumas.mdl", "--arg", "0"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("HoldsVacuously"));
}

#[test]
fn sisafe_unsafe_fails_with_two_witnesses() {
    let o = detpar(&["sisafe", "unsafe.mdl", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["verdict"]["kind"], "Fails");
    let roles: Vec<_> = r["witness_traces"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| w["role"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(roles, ["terminating", "stuck"]);
}

#[test]
fn typecheck_verdicts() {
    let o = detpar(&["typecheck", "unsafe.mdl", "--format", "json"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["verdict"], "Rejected");
    assert_eq!(r["error"]["kind"], "UnsplittableSharing");
    assert_eq!(r["error"]["variable"], "r");

    let o = detpar(&["typecheck", "dedup_demo.mdl"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("intarray 1 * intarray 1"));
}

#[test]
fn witness_traces_replay_to_the_same_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("unsafe.jsonl");
    let o = detpar(&["sisafe", "unsafe.mdl", "--trace-out", path(&trace)]);
    assert_eq!(code(&o), 1);

    let o = detpar(&["replay", "unsafe.mdl", path(&trace), "--format", "json"]);
    assert_eq!(code(&o), 1);
    assert_eq!(json(&o)["outcome"], "stuck");

    let terminating = dir.path().join("unsafe.jsonl.terminating");
    let again = dir.path().join("again.jsonl");
    let o = detpar(&["replay", "unsafe.mdl", path(&terminating), "--trace-out", path(&again)]);
    assert_eq!(code(&o), 0);
    // Replaying reproduces the trace file byte for byte.
    assert_eq!(std::fs::read(&terminating).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn replay_reports_the_failing_step() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("t.jsonl");
    let o = detpar(&["run", "pwrite_phases.mdl", "--trace-out", path(&trace)]);
    assert_eq!(code(&o), 0);
    // The same schedule does not fit a different program.
    let o = detpar(&["replay", "unsafe.mdl", path(&trace)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("replay failed at step"));
}

#[test]
fn run_policies() {
    let left = detpar(&["run", "hashset_demo.mdl", "--format", "json"]);
    assert_eq!(code(&left), 0);
    let a = detpar(&["run", "hashset_demo.mdl", "--policy", "random", "--seed", "11", "--format", "json"]);
    let b = detpar(&["run", "hashset_demo.mdl", "--policy", "random", "--seed", "11", "--format", "json"]);
    assert_eq!(stdout(&a), stdout(&b));
    assert_eq!(json(&a)["outcome"], "terminated");

    let o = detpar(&["run", "dumas.mdl", "--arg", "1844", "--limits-steps", "3", "--format", "json"]);
    assert_eq!(code(&o), 2);
    assert_eq!(json(&o)["outcome"], "truncated");
}

#[test]
fn random_policy_requires_a_seed() {
    let o = detpar(&["run", "dumas.mdl", "--policy", "random"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn limits_must_be_positive() {
    let o = detpar(&["sisafe", "dumas.mdl", "--limits-states", "0"]);
    assert_eq!(code(&o), 3);
}

#[test]
fn parse_errors_are_rendered() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("bad.mdl");
    std::fs::write(&file, "let x = 1 in\n  x +").unwrap();
    let o = detpar(&["typecheck", path(&file)]);
    assert_eq!(code(&o), 3);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.mdl:2:"), "{err}");
    assert!(err.contains('^'), "{err}");
}

#[test]
fn open_programs_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("open.mdl");
    std::fs::write(&file, "y + 1").unwrap();
    let o = detpar(&["sisafe", path(&file)]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains('y'));
}

#[test]
fn explore_reports_nondeterminism() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("race.mdl");
    std::fs::write(&file, "let r = alloc 1 in (| store r 0 1 , store r 0 2 |); load r 0").unwrap();
    let o = detpar(&["explore", path(&file), "--format", "json"]);
    assert_eq!(code(&o), 1);
    let r = json(&o);
    assert_eq!(r["deterministic"], false);
    assert_eq!(r["counterexample"].as_array().unwrap().len(), 2);

    let o = detpar(&["explore", "pwrite_phases.mdl"]);
    assert_eq!(code(&o), 0);

    let o = detpar(&["explore", "dumas.mdl", "--arg", "4", "--limits-states", "5"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn reports_do_not_depend_on_jobs() {
    let one = detpar(&["sisafe", "hashset_demo.mdl", "--format", "json", "--jobs", "1"]);
    let four = detpar(&["sisafe", "hashset_demo.mdl", "--format", "json", "--jobs", "4"]);
    assert_eq!(stdout(&one), stdout(&four));
}

#[test]
fn color_is_opt_in() {
    let o = Command::new(env!("CARGO_BIN_EXE_detpar"))
        .args(["typecheck", "unsafe.mdl"])
        .env("MDL_COLOR", "always")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("\x1b["));
    let o = detpar(&["typecheck", "unsafe.mdl"]);
    assert!(!stdout(&o).contains("\x1b["));
}

#[test]
fn corpus_expectations_hold() {
    let o = detpar(&["corpus", "--format", "json"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    let r = json(&o);
    assert_eq!(r["ok"], true);
    assert_eq!(r["programs"].as_array().unwrap().len(), 7);
}
