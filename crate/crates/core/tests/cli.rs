//! The command-line driver: documented invocations, exit codes,
//! schema versioning and byte-identical reruns.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jetforms")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["schema_version"], 1);
    v
}

#[test]
fn algebra_files() {
    let dual = json(&["algebra", "--kind", "trunc-poly", "--m", "1", "--N", "2"]);
    assert_eq!(dual["algebra"]["dim"], 2);
    let ext = json(&["algebra", "--kind", "even-exterior", "--m", "2"]);
    assert_eq!(ext["algebra"]["basis"], serde_json::json!(["1", "e1e2"]));
}

#[test]
fn invalid_table_exits_with_two() {
    let dir = std::env::temp_dir().join(format!("jetforms-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.json");
    std::fs::write(
        &path,
        r#"{"kind":"structure-constants","N":2,"basis":["1","e"],"table":[[0,0,0,"1"],[0,1,1,"1"],[1,0,1,"1"],[1,1,0,"1"]]}"#,
    )
    .unwrap();
    let out = run(&["algebra", "--algebra", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ideal"));
}

#[test]
fn cohomology_and_dims() {
    assert_eq!(json(&["cohomology", "--preset", "sl2z"])["dimH1"], 1);
    assert_eq!(json(&["cohomology", "--preset", "genus2"])["dimH1"], 6);
    let d = json(&["dims", "--preset", "sl2z", "--k", "12"]);
    assert_eq!((d["deg"].clone(), d["dimM"]["value"].clone(), d["dimS"]["value"].clone()), (1.into(), 2.into(), 1.into()));
}

#[test]
fn adapt_weight_twelve() {
    let v = json(&["adapt", "--preset", "sl2z", "--k", "12", "--direction", "h1:0"]);
    let forms = v["forms"].as_array().unwrap();
    assert_eq!(forms.len(), 2);
    assert!(forms.iter().all(|f| f["residual"].as_f64().unwrap() <= 1e-8));
    assert_eq!(forms.iter().filter(|f| f["cuspidal"] == true).count(), 1);
    assert_eq!(v["status"], "pass");
}

#[test]
fn failed_check_exits_nonzero_and_still_reports() {
    let out = run(&["adapt", "--k", "8", "--tol", "1e-300"]);
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["status"], "fail");
}

#[test]
fn reruns_are_byte_identical() {
    let args = ["eisenstein", "--k", "6", "--bound", "300", "--M", "6", "--threads", "3"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn config_file_and_flags() {
    let dir = std::env::temp_dir().join(format!("jetforms-cfg-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let cfg = dir.join("run.json");
    std::fs::write(&cfg, r#"{"preset": "sl2z", "algebra": {"kind": "truncated-polynomial", "m": 1, "N": 3}, "seed": 7}"#).unwrap();
    let out = dir.join("lift.json");
    let st = run(&["--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "lift"]);
    assert!(st.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["config"]["seed"], 7);
    assert_eq!(v["lattice"]["algebra_id"], "trunc-poly:m1:N3");
    let bad = run(&["--tol", "-1", "dims", "--k", "4"]);
    assert_eq!(bad.status.code(), Some(2));
}
