use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const SCENARIO: &str =
    r#"{"horizon":5,"suite":{"functionals":[{"kind":"total_const","value":0}],"operators":[]}}"#;

fn minpair(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_minpair"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn file(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_scenario(dir: &TempDir) -> (PathBuf, PathBuf) {
    let config = file(dir, "scenario.json", SCENARIO);
    let trace = dir.path().join("trace.jsonl");
    let out = minpair(&["run", "--config", s(&config), "--out", s(&trace)]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    (config, trace)
}

#[test]
fn run_writes_actions_at_two_and_four() {
    let dir = TempDir::new().unwrap();
    let (_, trace) = run_scenario(&dir);
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(
        lines[2],
        r#"{"stage":2,"action":{"e":0,"j":0,"witness":1,"restraint":2},"removals":[]}"#
    );
    assert_eq!(
        lines[4],
        r#"{"stage":4,"action":{"e":0,"j":1,"witness":3,"restraint":4},"removals":[]}"#
    );
    assert!(lines[5].starts_with(r#"{"schema_version":1,"horizon":5,"a0":[1],"a1":[3]"#));
}

#[test]
fn runs_are_byte_identical() {
    let dir = TempDir::new().unwrap();
    let (config, first) = run_scenario(&dir);
    let second = dir.path().join("again.jsonl");
    minpair(&["run", "--config", s(&config), "--out", s(&second)]);
    assert_eq!(fs::read(first).unwrap(), fs::read(second).unwrap());
}

#[test]
fn horizon_zero_gives_only_the_summary() {
    let dir = TempDir::new().unwrap();
    let config = file(&dir, "c.json", &SCENARIO.replace("5", "0"));
    let out = minpair(&["run", "--config", s(&config)]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.contains(r#""horizon":0"#));
}

#[test]
fn unwritable_output_exits_two() {
    let dir = TempDir::new().unwrap();
    let config = file(&dir, "c.json", SCENARIO);
    let out = minpair(&[
        "run",
        "--config",
        s(&config),
        "--out",
        "/nonexistent/dir/t.jsonl",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn bad_config_exits_two_with_diagnostic() {
    let dir = TempDir::new().unwrap();
    let config = file(
        &dir,
        "c.json",
        &SCENARIO.replace("total_const", "total_bogus"),
    );
    let out = minpair(&["run", "--config", s(&config)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("total_bogus"));
}

#[test]
fn genuine_trace_verifies() {
    let dir = TempDir::new().unwrap();
    let (config, trace) = run_scenario(&dir);
    let report = dir.path().join("report.json");
    let out = minpair(&[
        "verify",
        "--trace",
        s(&trace),
        "--config",
        s(&config),
        "--checks",
        "all",
        "--report",
        s(&report),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(report).unwrap()).unwrap();
    assert_eq!(report["checks"]["oracle_diff"]["verdict"], "pass");
    assert_eq!(report["checks"]["property2.0.0"]["verdict"], "pass");
    assert_eq!(
        report["checks"]["structural.single_entry"]["verdict"],
        "pass"
    );
}

#[test]
fn forged_double_insertion_exits_one() {
    let dir = TempDir::new().unwrap();
    let (config, trace) = run_scenario(&dir);
    let text = fs::read_to_string(trace).unwrap().replace(
        r#"{"stage":3,"action":null,"removals":[]}"#,
        r#"{"stage":3,"action":{"e":0,"j":0,"witness":1,"restraint":3},"removals":[]}"#,
    );
    let forged = file(&dir, "forged.jsonl", &text);
    let out = minpair(&[
        "verify",
        "--trace",
        s(&forged),
        "--config",
        s(&config),
        "--checks",
        "structural",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(
        report["checks"]["structural.single_entry"]["verdict"],
        "fail"
    );
    assert_eq!(
        report["checks"]["structural.single_entry"]["counterexample"]["stage"],
        3
    );
}

#[test]
fn malformed_trace_exits_three() {
    let dir = TempDir::new().unwrap();
    let (config, trace) = run_scenario(&dir);
    let text = fs::read_to_string(&trace)
        .unwrap()
        .replace("witness", "wit");
    let broken = file(&dir, "broken.jsonl", &text);
    for cmd in ["verify", "report"] {
        let mut args = vec![cmd, "--trace", s(&broken)];
        if cmd == "verify" {
            args.extend(["--config", s(&config)]);
        }
        let out = minpair(&args);
        assert_eq!(out.status.code(), Some(3), "{cmd}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("line 3"));
    }
}

#[test]
fn psi_prints_the_table() {
    let dir = TempDir::new().unwrap();
    let config = file(
        &dir,
        "c.json",
        r#"{"horizon":8,"suite":{"functionals":[],"operators":[
            {"kind":"axioms","axioms":[{"stage":0,"premise":[],"output":[5,1]}]},
            {"kind":"axioms","axioms":[{"stage":0,"premise":[],"output":[5,1]}]}]}}"#,
    );
    let trace = dir.path().join("t.jsonl");
    minpair(&["run", "--config", s(&config), "--out", s(&trace)]);
    let out = minpair(&[
        "psi",
        "--trace",
        s(&trace),
        "--config",
        s(&config),
        "--e0",
        "0",
        "--e1",
        "1",
        "--bound",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["table"]["entries"]["5"]["value"], 1);
    assert_eq!(v["table"]["entries"]["5"]["stage"], 0);
    assert_eq!(v["density"], serde_json::json!([1, 10]));
}

#[test]
fn report_lists_actions() {
    let dir = TempDir::new().unwrap();
    let (_, trace) = run_scenario(&dir);
    let out = minpair(&["report", "--trace", s(&trace)]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("horizon 5: 2 actions"), "{text}");
    assert!(text.contains("P(0,0) puts 1 into A_0"));
}
