use std::io::Write;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_levy-stein"))
}

fn run_file(spec: &str, extra: &[&str]) -> Output {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    f.write_all(spec.as_bytes()).unwrap();
    bin().arg("run").arg(f.path()).args(extra).output().unwrap()
}

const GAMMA_STEIN: &str = r#"{"distribution":{"family":"gamma","params":{"a":2,"b":1}},
    "task":{"kind":"stein","g":"sin"},"mc":{"n_samples":20000,"seed":4}}"#;

#[test]
fn cumulants_report() {
    let out = run_file(
        r#"{"distribution":{"family":"poisson","params":{"lambda":3}},"task":{"kind":"cumulants","k_max":4}}"#,
        &[],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    for key in ["input", "results", "diagnostics", "warnings"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let closed: Vec<f64> = v["results"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|r| r["method"] == "closed_form")
        .map(|r| r["value"].as_f64().unwrap())
        .collect();
    assert_eq!(closed, vec![3.0; 4]);
    let defaults = v["diagnostics"]["defaults_applied"].as_array().unwrap();
    assert!(defaults.iter().any(|d| d == "mc.seed"));
}

#[test]
fn identical_spec_gives_identical_bytes() {
    let a = run_file(GAMMA_STEIN, &[]);
    let b = run_file(GAMMA_STEIN, &[]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let c = run_file(GAMMA_STEIN, &["--seed", "5"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn csv_output_and_stdin() {
    let mut child = bin()
        .args(["run", "-", "--format", "csv", "--samples", "5000"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(GAMMA_STEIN.as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("metric,value,std_error,method,n"));
    let row = lines.next().unwrap();
    assert!(row.starts_with("stein_residual,") && row.ends_with(",numeric,5000"), "{row}");
}

#[test]
fn exit_codes() {
    let bad_beta = run_file(
        r#"{"distribution":{"family":"cgmy","params":{"alpha":1,"beta":1.2,"lambda_plus":1,"lambda_minus":1}},"task":{"kind":"gini"}}"#,
        &[],
    );
    assert_eq!(bad_beta.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&bad_beta.stderr).contains("beta must lie in [0, 1)"));
    assert_eq!(run_file("{not json", &[]).status.code(), Some(2));
    assert_eq!(run_file(GAMMA_STEIN, &["--samples", "10"]).status.code(), Some(2));
    let divergent = run_file(
        r#"{"distribution":{"family":"gamma","params":{"a":2,"b":1}},"task":{"kind":"stein","g":"exp_tilt(3)"},"mc":{"n_samples":2000}}"#,
        &[],
    );
    assert_eq!(divergent.status.code(), Some(3));
    let missing = bin().args(["run", "/nonexistent/spec.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(1));
}
