//! End-to-end behavior of the `gearkin` binary: exit codes, golden output,
//! JSON round-trips, determinism.

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

fn gearkin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gearkin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("utf-8 stderr")
}

#[test]
fn emit_matrices_matches_golden() {
    let out = gearkin(&["emit-matrices", fixture("grm.json").to_str().unwrap()]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(fixture("golden/grm_matrices.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn analyze_verify_matches_golden() {
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--method",
        "both",
        "--symbolic",
        "--verify",
    ]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(fixture("golden/grm_analyze_verify.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
    // Timing goes to stderr, never into the comparable payload.
    assert!(stderr(&out).contains("timing:"));
    assert!(!stdout(&out).contains("timing"));
}

#[test]
fn analyze_ratios_matches_golden() {
    let out = gearkin(&["analyze", fixture("grm.json").to_str().unwrap(), "--ratios"]);
    assert!(out.status.success());
    let golden = std::fs::read_to_string(fixture("golden/grm_analyze_ratios.txt")).unwrap();
    assert_eq!(stdout(&out), golden);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let file = fixture("grm.json");
    let args = [
        "analyze",
        file.to_str().unwrap(),
        "--method",
        "both",
        "--symbolic",
        "--verify",
    ];
    let first = gearkin(&args);
    let second = gearkin(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn json_report_round_trips() {
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--format",
        "json",
        "--verify",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    let report: gearkin_cli::report::AnalysisReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.mechanism, "GRM");
    assert_eq!(report.dof, 3);
    assert!(report.graph_matrices.is_some());
    // Re-serializing the parsed report reproduces the emitted bytes.
    assert_eq!(report.to_json(), text);
}

#[test]
fn missing_binding_is_a_validation_error() {
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--bind",
        "d1=2,d2=3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("unbound symbol"));
}

#[test]
fn full_bindings_run_numerically() {
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--bind",
        "d1=2,d2=3,d3=4,d4=5,d5=6,d6=7,d7p=8,d7pp=9,A1=10,A2=20,A3=30,B1=40,B2=50",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("-315/32"));
    assert!(text.contains("verdict: matched"));
}

#[test]
fn contradicted_sign_exits_3() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("grm.json")).unwrap()).unwrap();
    doc["gear_meshes"][0]["sign"] = serde_json::json!(1);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flipped.json");
    std::fs::write(&path, doc.to_string()).unwrap();

    let out = gearkin(&[
        "analyze",
        path.to_str().unwrap(),
        "--symbolic",
        "--verify",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stdout(&out).contains("verdict: mismatched"));
}

#[test]
fn invalid_file_exits_2() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("grm.json")).unwrap()).unwrap();
    doc["inputs"] = serde_json::json!([8, 9]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, doc.to_string()).unwrap();

    let out = gearkin(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("input count"));

    let out = gearkin(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn validate_reports_counts() {
    let out = gearkin(&["validate", fixture("grm.json").to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("ok: GRM"));
    assert!(text.contains("7 turning pairs"));
    assert!(text.contains("3 dof"));
}

#[test]
fn inputs_override_is_validated() {
    // A singular input choice is rejected with the dependent joints named.
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--inputs",
        "8,9,10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("P_r singular"));

    // A different nonsingular choice works: drive joints 11 and 12 instead
    // of 9 and 11.
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--inputs",
        "8,11,12",
    ]);
    assert!(out.status.success(), "stderr: {}", stderr(&out));

    // Wrong count is a validation error.
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--inputs",
        "8,9",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_method_runs_have_no_verdict() {
    let out = gearkin(&[
        "analyze",
        fixture("grm.json").to_str().unwrap(),
        "--method",
        "matroid",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("[matroid]"));
    assert!(!text.contains("[tt]"));
    assert!(!text.contains("verdict"));
}

#[test]
fn inexact_angles_are_rejected_in_symbolic_mode() {
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(fixture("grm.json")).unwrap()).unwrap();
    doc["turning_joints"][0]["phi_deg"] = serde_json::json!(30.0);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("inexact.json");
    std::fs::write(&path, doc.to_string()).unwrap();

    let out = gearkin(&["analyze", path.to_str().unwrap(), "--symbolic"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("symbolic mode is unavailable"));
}
