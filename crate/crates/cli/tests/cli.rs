use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use reinit_core::io::read_field_csv;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_reinit"))
}

fn bundled(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs").join(name)
}

fn reinit(args: &[&str], config: &Path, out: &Path) -> Output {
    bin().args(args).arg(config).arg("--output-dir").arg(out).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stderr)))
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    std::fs::write(&p, body).unwrap();
    p
}

const SMALL_CIRCLE: &str = r#"{
    "problem": {"u0": "x^2 + y^2 - 0.25", "delta": 0.1, "norm": {"type": "p", "p": 2}},
    "grid": {"x": [-1, 1], "y": [-1, 1], "points": 41},
    "scheme": {"variant": "godunov"},
    "run": {"t_final": 0.5},
    "seed": 3
}"#;

#[test]
fn audit_bundled_circle_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let o = reinit(&["audit"], &bundled("circle.json"), tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["pass"], true);
    for key in ["G1", "G2", "G3", "G4", "G5", "H1", "H2", "H3", "H4", "H5"] {
        let status = v["report"][key]["status"].as_str().unwrap();
        assert!(status == "pass" || status == "pass_by_construction", "{key}: {status}");
    }
    assert!(tmp.path().join("audit.json").exists());
}

#[test]
fn run_check_without_sign_change_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL_CIRCLE.replace("- 0.25", "+ 0.25"));
    let o = reinit(&["run", "--check"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["message"], "no interface in domain");
    assert_eq!(e["error"]["exit_code"], 2);
}

#[test]
fn oracle_line_config_agrees() {
    let tmp = tempfile::tempdir().unwrap();
    let o = reinit(&["oracle", "--check"], &bundled("line.json"), tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let h = v["h"].as_f64().unwrap();
    assert!(v["report"]["max_disagreement"].as_f64().unwrap() <= 2.0 * h);
    let brute = read_field_csv::<f64>(&tmp.path().join("distance_brute_force.csv")).unwrap();
    assert_eq!(brute.len(), 81 * 81);
    assert!(tmp.path().join("interface.csv").exists());
}

#[test]
fn unknown_key_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), &SMALL_CIRCLE.replace("\"seed\"", "\"sead\""));
    let o = reinit(&["audit"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["kind"], "config");
    assert!(e["error"]["message"].as_str().unwrap().contains("sead"));
}

#[test]
fn blow_up_is_numerical_failure() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_CIRCLE.replace(r#""t_final": 0.5"#, r#""t_final": 1000, "dt": 5, "integrator": "euler""#);
    let cfg = write_config(tmp.path(), &body);
    let o = reinit(&["run"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_json(&o)["error"]["kind"], "numerical_failure");
}

#[test]
fn failed_checks_exit_four_only_with_check() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_CIRCLE.replace(r#""seed": 3"#, r#""seed": 3, "analysis": {"tolerances": {"sup_error": 1e-6}}"#);
    let cfg = write_config(tmp.path(), &body);
    let o = reinit(&["run", "--check"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(4));
    let e = stderr_json(&o);
    assert_eq!(e["error"]["failed"][0]["name"], "sup_error");
    let o = reinit(&["run"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["passed"], false);
}

#[test]
fn run_writes_artifacts_and_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_CIRCLE);
    let out = tmp.path().join("out");
    let o = reinit(&["run", "--check"], &cfg, &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["run.json", "u0.csv", "final.csv", "distance.csv", "interface.csv", "error_curve.csv", "drift.csv", "residual.csv"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    let curve = std::fs::read_to_string(out.join("error_curve.csv")).unwrap();
    assert_eq!(curve.lines().next(), Some("t,sup_error"));
}

#[test]
fn reports_are_deterministic_and_seed_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_CIRCLE);
    let a = reinit(&["oracle"], &cfg, &tmp.path().join("a"));
    let b = reinit(&["oracle"], &cfg, &tmp.path().join("b"));
    assert_eq!(a.stdout, b.stdout);
    let fa = std::fs::read(tmp.path().join("a/oracle.json")).unwrap();
    let fb = std::fs::read(tmp.path().join("b/oracle.json")).unwrap();
    assert_eq!(fa, fb);
    let c = bin().args(["oracle", "--seed", "99", "--output-dir"]).arg(tmp.path().join("c")).arg(&cfg).output().unwrap();
    assert_eq!(stdout_json(&c)["seed"], 99);
}

#[test]
fn studies_report_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let body = SMALL_CIRCLE.replace(r#""seed": 3"#, r#""seed": 3, "analysis": {"resolutions": [11, 21, 41], "epsilons": [1, 0.5]}"#);
    let cfg = write_config(tmp.path(), &body);
    let o = reinit(&["study-refine"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = stdout_json(&o)["report"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 3);
    assert!(rows[0]["observed_order"].is_null());
    assert!(rows[2]["observed_order"].is_number());

    let o = reinit(&["study-rescale"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rows = stdout_json(&o)["report"]["rows"].as_array().unwrap().clone();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1]["requested_time"], 2.0);
}

#[test]
fn refine_without_resolutions_is_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_CIRCLE);
    let o = reinit(&["study-refine"], &cfg, tmp.path());
    assert_eq!(o.status.code(), Some(2));
}
