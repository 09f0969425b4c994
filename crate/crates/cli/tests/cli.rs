use std::process::Command;

use serde_json::Value;

fn weilzeta(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_weilzeta")).args(args).output().expect("binary runs");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn json(args: &[&str]) -> Value {
    let mut all = vec!["--json"];
    all.extend_from_slice(args);
    let (code, stdout, stderr) = weilzeta(&all);
    assert_eq!(code, 0, "{stderr}");
    serde_json::from_str(&stdout).expect("json report")
}

#[test]
fn field_report_schema() {
    let r = json(&["field", "--disc", "1", "--places", "2"]);
    assert_eq!(r["order"]["weil"], 1);
    assert_eq!(r["order"]["analytic"], 1);
    assert_eq!(r["order"]["match"], true);
    assert_eq!(r["value"]["match"], "exact");
    assert_eq!(r["value"]["weil"]["rational"], "-1/2");
    assert_eq!(r["value"]["weil"]["logs"]["2"], 1);
}

#[test]
fn gaussian_orders() {
    let r = json(&["order", "--disc", "-4", "--conductor", "3"]);
    assert_eq!(r["value"]["weil"]["rational"], "-1/2");
    assert_eq!(r["order"]["weil"], 0);
    assert_eq!(r["third"]["match"], "exact");
    let r = json(&["order", "--disc", "-4", "--conductor", "5"]);
    assert_eq!(r["value"]["weil"]["rational"], "-1/4");
    assert_eq!(r["value"]["weil"]["logs"]["5"], 1);
}

#[test]
fn real_field_within_tolerance() {
    let r = json(&["field", "--disc", "8"]);
    assert_eq!(r["value"]["match"], "tol");
    let v = r["value"]["weil"]["float"].as_f64().unwrap();
    assert!((v + (1.0 + 2f64.sqrt()).ln() / 2.0).abs() < 1e-9);
}

#[test]
fn curves_and_points() {
    let r = json(&["curve", "--name", "split node /F5"]);
    assert_eq!(r["value"]["weil"]["rational"], "-1/4");
    let r = json(&["curve", "--q", "5", "--poly", "y^2*z = x^3 + x*z^2"]);
    assert_eq!(r["value"]["weil"]["rational"], "-1");
    assert_eq!(r["value"]["weil"]["logs"]["5"], -1);
    let r = json(&["point-module", "--module", r#"{"relations":[[0]],"frobenius":[[1]],"order":1}"#, "--norm", "9"]);
    assert_eq!(r["order"]["weil"], -1);
    assert_eq!(r["value"]["weil"]["logs"]["3"], -1);
    assert_eq!(r["value"]["weil"]["rational"], "1/2");
}

#[test]
fn analytic_values() {
    let r = json(&["analytic", "--disc", "-4"]);
    assert_eq!(r["zeta_star"]["rational"], "-1/4");
    assert_eq!(r["l_at_zero"], "1/2");
}

#[test]
fn lattice_trials_and_suite_exit_zero() {
    let (code, stdout, _) = weilzeta(&["check-appendix", "--trials", "20"]);
    assert_eq!(code, 0);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("PASS")).count(), 40);
    let (code, stdout, _) = weilzeta(&["verify-suite"]);
    assert_eq!(code, 0);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn bad_input_is_rejected() {
    let (code, _, stderr) = weilzeta(&["field", "--disc", "-284"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("error"));
    let (code, _, _) = weilzeta(&["curve", "--q", "5", "--poly", "y^2*z = x^3 + x^2*z"]);
    assert_eq!(code, 2);
    let (code, _, _) = weilzeta(&["analytic", "--disc", "5", "--at", "1"]);
    assert_eq!(code, 2);
}
