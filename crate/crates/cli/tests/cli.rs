use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn kappa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kappa")).args(args).output().unwrap()
}

fn write(dir: &TempDir, name: &str, body: &str) -> String {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap()
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

#[test]
fn distance_rho_to_a_ball() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.json", "[3, 4]");
    let b = write(&dir, "b.json", r#"{"type":"ball","center":[0,0],"radius":1}"#);
    let o = kappa(&["distance", "--a", &x, "--b", &b, "--metric", "rho"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["command"], "distance");
    assert_eq!(v["results"]["value"], 4.0);
    assert!(v.get("wall_time_s").is_none());
}

#[test]
fn empty_target_reports_inf() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.json", "[3, 4]");
    let b = write(&dir, "b.json", r#"{"type":"empty"}"#);
    let v = stdout_json(&kappa(&["distance", "--a", &x, "--b", &b, "--metric", "rho"]));
    assert_eq!(v["results"]["value"], "inf");
}

#[test]
fn axioms_default_suite() {
    let o = kappa(&["axioms", "--seed", "1", "--instances", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["results"]["suite"], "kappa");
    assert_eq!(v["results"]["entries"].as_array().unwrap().len(), 9);
    assert_eq!(v["config"]["seed"], 1);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(kappa(&["axioms"]).status.code(), Some(2));
    assert_eq!(kappa(&["distance", "--metric", "hausdorff"]).status.code(), Some(2));
    assert_eq!(kappa(&["frobnicate"]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let t = write(
        &dir,
        "t.json",
        r#"{"op":"rho_tilde","x":[2,2],"A":{"type":"ball","center":[0,0],"radius":1}}"#,
    );
    let o = kappa(&["duality", "--input", &t]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "usage");
}

#[test]
fn schema_errors_exit_3() {
    let dir = tempfile::tempdir().unwrap();
    let x = write(&dir, "x.json", "[0, 0]");
    for body in [
        r#"{"type":"ball","center":[0,0],"radius":-1}"#,
        r#"{"type":"ball","center":[0,0]"#,
        r#"{"type":"prism"}"#,
    ] {
        let b = write(&dir, "b.json", body);
        let o = kappa(&["distance", "--a", &x, "--b", &b, "--metric", "rho"]);
        assert_eq!(o.status.code(), Some(3), "{body}");
        assert_eq!(stderr_json(&o)["exit_code"], 3);
    }
    let b = write(&dir, "b.json", r#"{"type":"ball","center":[0,0,0],"radius":1}"#);
    assert_eq!(
        kappa(&["distance", "--a", &x, "--b", &b, "--metric", "rho"])
            .status
            .code(),
        Some(3)
    );
    let op = write(
        &dir,
        "op.json",
        r#"{"A":{"matrix":[[1,2],[2,4]]},"S":{"type":"empty"}}"#,
    );
    assert_eq!(kappa(&["opnorm", "--input", &op, "--seed", "1"]).status.code(), Some(3));
    let cyc = write(
        &dir,
        "cyc.json",
        r#"{"elements":["a","b"],"less":[["a","b"],["b","a"]]}"#,
    );
    assert_eq!(kappa(&["order", "check", "--input", &cyc]).status.code(), Some(3));
}

#[test]
fn computation_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(
        &dir,
        "p.json",
        r#"{"elements":["a","b","c","d"],"less":[["a","b"],["c","d"]]}"#,
    );
    let o = kappa(&["order", "represent", "--input", &p]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "computation");
    let f = write(
        &dir,
        "f.json",
        r#"{"function":{"values":{"a":0,"b":1}},"positions":{"a":0,"b":1},"C1":0.5,"C2":1}"#,
    );
    assert_eq!(kappa(&["order", "fit", "--input", &f]).status.code(), Some(1));
    let polar3 = write(
        &dir,
        "polar.json",
        r#"{"op":"polar","A":{"type":"polytope","vertices":[[1,0,0],[0,1,0],[0,0,1],[-1,-1,-1]]}}"#,
    );
    assert_eq!(kappa(&["duality", "--input", &polar3]).status.code(), Some(1));
}

#[test]
fn io_errors_exit_4() {
    let o = kappa(&["order", "check", "--input", "/nonexistent/order.json"]);
    assert_eq!(o.status.code(), Some(4));
    assert_eq!(stderr_json(&o)["error"], "io");
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "p.json", r#"{"elements":["a"],"less":[]}"#);
    let o = kappa(&["order", "check", "--input", &p, "--out", "/nonexistent/dir/out.json"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn out_and_timing_flags() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(&dir, "p.json", r#"{"elements":["a","b"],"less":[["a","b"]]}"#);
    let out: PathBuf = dir.path().join("report.json");
    let o = kappa(&[
        "order",
        "check",
        "--input",
        &p,
        "--out",
        out.to_str().unwrap(),
        "--timing",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["results"]["interval_order"], true);
    assert!(v["wall_time_s"].as_f64().unwrap() >= 0.0);
}

#[test]
fn ode_writes_csv() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        &dir,
        "s.json",
        r#"{"field":{"builtin":"zero"},"A0":{"type":"polytope","vertices":[[0,0],[1,0],[0,1]]},"t_end":0.05,"h":0.01}"#,
    );
    let csv = dir.path().join("t.csv");
    let o = kappa(&["ode", "--input", &s, "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,vertex_index,x1,x2"));
    assert_eq!(lines.count(), 6 * 3);
    let v = stdout_json(&o);
    assert_eq!(v["results"]["kind"], "set");
    assert_eq!(v["results"]["nodes"], 6);
}

#[test]
fn ode_flags_override_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        &dir,
        "s.json",
        r#"{"field":{"affine":{"L":[[-1]]}},"x0":[1],"t_end":5}"#,
    );
    let v = stdout_json(&kappa(&["ode", "--input", &s, "--tend", "1", "--h", "0.001"]));
    assert_eq!(v["results"]["final_time"], 1.0);
    let x = v["results"]["final_state"][0].as_f64().unwrap();
    assert!((x - (-1f64).exp()).abs() < 1e-6);
}

#[test]
fn opnorm_reports_value_and_bracket() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        &dir,
        "op.json",
        r#"{"A":{"matrix":[[1,0],[0,1]]},"S":{"type":"finite","ops":[{"matrix":[[1,0],[0,1]]}]}}"#,
    );
    let v = stdout_json(&kappa(&["opnorm", "--input", &s, "--seed", "2"]));
    assert_eq!(v["results"]["value"], 0.0);
    assert_eq!(v["results"]["probes"], 8);
}
