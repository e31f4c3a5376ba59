use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

use qact::examples;
use qact::Settings;
use qact_core::qg::examples::c_zn;

fn qact(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qact")).args(args).env_remove("QACT_TOL").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
    p.display().to_string()
}

fn swap_action() -> Value {
    let l = examples::load("c_z2_swap", &Settings::default()).unwrap();
    let mut v = l.action.as_ref().unwrap().to_json().unwrap();
    v["qg"] = c_zn(2).unwrap().to_json();
    v
}

#[test]
fn malformed_json_exits_2_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(&p, "{\n  \"kind\": \"finite\",\n  \"block_dims\": [1, 1\n}\n").unwrap();
    let o = qact(&["qg", "check", "--input", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 4") && err.contains("column"), "{err}");
}

#[test]
fn missing_file_and_flag_misuse_exit_2() {
    assert_eq!(code(&qact(&["qg", "check", "--input", "/nonexistent/g.json"])), 2);
    assert_eq!(code(&qact(&["qg", "check"])), 2);
    assert_eq!(code(&qact(&["suite", "--suite", "everything", "--example", "c_z2"])), 2);
}

#[test]
fn broken_counit_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut g = c_zn(2).unwrap().to_json();
    g["epsilon"] = json!([[1.0, 0.0], [1.0, 0.0]]);
    let p = write(dir.path(), "g.json", &g);
    let o = qact(&["qg", "check", "--input", &p]);
    assert_eq!(code(&o), 3, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn non_coaction_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let mut v = swap_action();
    let alpha = v["alpha"].as_array_mut().unwrap();
    alpha[0][0] = json!([0.5, 0.0]);
    let p = write(dir.path(), "act.json", &v);
    assert_eq!(code(&qact(&["action", "verify", "--input", &p])), 3);
    assert_eq!(code(&qact(&["examples", "--example", "c_z9"])), 0);
    assert_eq!(code(&qact(&["qg", "check", "--example", "c_z9"])), 3);
}

#[test]
fn file_input_matches_example() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "act.json", &swap_action());
    let o = qact(&["freeness", "--action", &p, "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["agree"], json!(true));
    assert_eq!(v["free"], json!(true));
    assert!(v["ellwood"].is_object() && v["saturation"].is_object());
}

#[test]
fn trivial_action_freeness_suite_passes_by_agreement() {
    let o = qact(&["suite", "--suite", "freeness", "--example", "c_z2+trivial", "--json"]);
    assert_eq!(code(&o), 0);
    let r = stdout_json(&o);
    assert_eq!(r["verdicts"]["free"], json!(false));
    assert_eq!(r["verdicts"]["saturated"], json!(false));
    assert_eq!(r["verdicts"]["agree"], json!(true));
    assert_eq!(r["settings"]["seed"], json!(7));
}

#[test]
fn failing_check_exits_1() {
    // exact axioms still validate; rounding in the corepresentations does not
    let o = qact(&["qg", "check", "--example", "c_s3", "--assert-tol", "1e-30"]);
    assert_eq!(code(&o), 1);
}

#[test]
fn examples_catalog() {
    let o = qact(&["examples", "--json"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    let list = v.as_array().unwrap();
    assert!(list.iter().filter(|e| e["kind"] != json!("action")).count() >= 5);
    for e in list {
        assert!(e["expected_verdict"] == json!("free") || e["expected_verdict"] == json!("not free"));
    }
}

#[test]
fn witness_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w.json");
    let w = w.to_str().unwrap();
    let o = qact(&["projectivity", "--example", "c_s3_translation", "--pi", "std", "--out", w]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    let o = qact(&["verify-witness", "--example", "c_s3_translation", "--witness", w, "--json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["pass"], json!(true));
    // a witness for one action is rejected by another
    let o = qact(&["verify-witness", "--example", "c_z2_translation", "--witness", w]);
    assert_ne!(code(&o), 0);
}

#[test]
fn index_command_and_quasi_basis() {
    let dir = tempfile::tempdir().unwrap();
    let qb = dir.path().join("qb.json");
    let o = qact(&["index", "--example", "c_s3_translation", "--pi", "std", "--json", "--emit-quasi-basis", qb.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert!((v["qdim_sq"].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!(v["residual"].as_f64().unwrap() < 1e-7);
    assert_eq!(v["index_matrix"].as_array().unwrap().len(), 2);
    let stored: Value = serde_json::from_str(&std::fs::read_to_string(&qb).unwrap()).unwrap();
    assert_eq!(stored["pi"], json!("std"));
    assert_eq!(stored["pairs"].as_array().unwrap().len(), v["quasi_basis_size"].as_u64().unwrap() as usize);

    let o = qact(&["index", "--example", "c_s3_translation", "--pi", "triv+std", "--json"]);
    assert_eq!(code(&o), 0);
    assert!((stdout_json(&o)["index_scalar"].as_f64().unwrap() - 9.0).abs() < 1e-7);
}

#[test]
fn tolerance_env_var_reaches_report() {
    let o = Command::new(env!("CARGO_BIN_EXE_qact"))
        .args(["action", "verify", "--example", "c_z2_swap", "--json"])
        .env("QACT_TOL", "1e-11")
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["settings"]["tol"], json!(1e-11));
}

#[test]
fn report_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let r = dir.path().join("r.json");
    let o = qact(&["suite", "--suite", "axioms", "--example", "dual_s3", "--json", "--report", r.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    assert_eq!(std::fs::read(&r).unwrap(), o.stdout);
}
