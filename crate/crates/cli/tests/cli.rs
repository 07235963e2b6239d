use std::process::{Command, Output};

use serde_json::Value;

fn hgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgp")).args(args).output().expect("hgp runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn verify_json(args: &[&str]) -> (i32, Value) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let mut full = vec!["verify"];
    full.extend_from_slice(args);
    full.extend_from_slice(&["--json", path.to_str().unwrap()]);
    let o = hgp(&full);
    let text = std::fs::read_to_string(&path).expect("report written");
    (o.status.code().unwrap(), serde_json::from_str(&text).unwrap())
}

#[test]
fn gamma_at_one_half() {
    let o = hgp(&["gamma", "--p", "5", "--prec", "2", "--x", "1/2"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "5^0 * [18] (mod 5^2)");
}

#[test]
fn gamma_rejects_non_integral_argument() {
    let o = hgp(&["gamma", "--p", "5", "--prec", "2", "--x", "1/5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn eval_g_special_value() {
    let o = hgp(&["eval-g", "--p", "5", "--prec", "4", "--upper", "0,1/2", "--lower", "1/6,5/6", "--t", "1"]);
    assert!(o.status.success());
    // -1 mod 5^4
    assert!(stdout(&o).starts_with("5^0 * [624] (mod 5^4)"), "{}", stdout(&o));
}

#[test]
fn count_with_prediction() {
    let o = hgp(&[
        "count", "--p", "5", "--d", "4", "--a", "1", "--b", "1", "--shape", "linear", "--predict", "--prec", "3",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("points: 7"), "{out}");
    assert!(!out.contains("DIFFER"), "{out}");
}

#[test]
fn count_rejects_inadmissible_degree() {
    let o = hgp(&["count", "--p", "5", "--d", "5", "--a", "1", "--b", "1", "--shape", "linear"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gauss_modes() {
    let o = hgp(&["gauss", "--p", "3", "--r", "2", "--mode", "complex"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let o = hgp(&["gauss", "--p", "7", "--mode", "padic", "--piprec", "12"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(stdout(&o).matches("(agree)").count(), 6);
}

#[test]
fn verify_floors_report() {
    let (code, rep) = verify_json(&["--suite", "floors", "--p", "5", "--d", "4", "--prec", "1"]);
    assert_eq!(code, 0);
    assert_eq!(rep["schemaVersion"], 1);
    assert_eq!(rep["passed"], 2);
    assert_eq!(rep["failed"], 0);
    let h = &rep["header"];
    assert_eq!((h["p"].as_u64(), h["q"].as_u64(), h["suite"].as_str()), (Some(5), Some(5), Some("floors")));
    for key in ["modulus", "generator", "N_req", "N_work", "seed"] {
        assert!(h.get(key).is_some(), "missing header {key}");
    }
    let case = &rep["cases"][0];
    for key in ["params", "lhsText", "rhsText", "equal"] {
        assert!(case.get(key).is_some(), "missing case {key}");
    }
}

#[test]
fn verify_gross_koblitz() {
    let (code, rep) = verify_json(&["--suite", "gross-koblitz", "--p", "5", "--prec", "12"]);
    assert_eq!(code, 0);
    assert_eq!(rep["passed"], 4);
}

#[test]
fn verify_is_deterministic() {
    let args = ["--suite", "sum-odd", "--p", "5", "--r", "2", "--prec", "3", "--grid", "sample:12", "--seed", "42"];
    let (_, mut a) = verify_json(&args);
    let (_, mut b) = verify_json(&args);
    a["wallMillis"] = Value::Null;
    b["wallMillis"] = Value::Null;
    assert_eq!(a, b);
    assert_eq!(a["header"]["seed"], 42);
    assert_eq!(a["cases"].as_array().unwrap().len(), 24);
}

#[test]
fn verify_usage_errors_exit_2() {
    for args in [
        vec!["verify", "--suite", "nope", "--p", "5", "--prec", "2"],
        vec!["verify", "--suite", "sum-even", "--p", "5", "--d", "3", "--prec", "2"],
        vec!["verify", "--suite", "counts", "--p", "5", "--prec", "2", "--grid", "some"],
        vec!["verify", "--suite", "counts", "--p", "4", "--prec", "2"],
        vec!["verify", "--suite", "counts", "--p", "5"],
    ] {
        assert_eq!(hgp(&args).status.code(), Some(2), "{args:?}");
    }
}
