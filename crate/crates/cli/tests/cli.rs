use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(command: &str, config: &str, out: &Path, extra: &[&str]) -> Output {
    let cfg = out.with_extension("json");
    fs::write(&cfg, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_maxsemi"))
        .arg(command)
        .arg("--config")
        .arg(&cfg)
        .arg("--out")
        .arg(out)
        .args(extra)
        .output()
        .unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

const FRECHET: &str = r#""psi": {"branch": "frechet", "alpha": 1.0, "a": 2.0, "b": 2.0, "base": 1.0}"#;

#[test]
fn verify_constant_frechet_exits_zero_and_names_anchors() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("verify");
    let res = run("verify", &format!(r#"{{"dist": {{{FRECHET}}}}}"#), &out, &[]);
    assert_eq!(res.status.code(), Some(0));
    let report = json(&out.join("report.json"));
    assert_eq!(report["pass"], true);
    let names: Vec<&str> = report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap())
        .collect();
    for anchor in ["Rem22", "Thm41", "Thm42", "QuantileClosedForm"] {
        assert!(names.contains(&anchor), "{anchor} missing from {names:?}");
    }
    for c in report["checks"].as_array().unwrap() {
        assert!(c.get("max_err").is_some() && c.get("pass").is_some());
    }
}

#[test]
fn broken_normalization_exits_one_with_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("bad");
    let cfg = r#"{"dist": {"psi": {"branch": "frechet", "alpha": 1.0, "a": 2.0, "b": 3.0, "base": 1.0}}}"#;
    let res = run("verify", cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&res.stderr).unwrap();
    assert_eq!(err["invariant"], "a*b^(-alpha) = 1");
    assert_eq!(json(&out.join("error.json")), err);
}

#[test]
fn unknown_fields_and_garbage_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let typo = format!(r#"{{"dist": {{{FRECHET}}}, "gridsize": 11}}"#);
    assert_eq!(run("verify", &typo, &dir.path().join("a"), &[]).status.code(), Some(1));
    assert_eq!(run("eval", "not json", &dir.path().join("b"), &[]).status.code(), Some(1));
}

#[test]
fn make_dist_echoes_normalized_spec() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("md");
    let cfg = r#"{"dist": {"psi": {"branch": "weibull", "a": 2.0, "b": 0.5, "base": 1.0,
        "harmonics": [{"amplitude": 0.1, "phase": 7.0}]}, "phi": {"kind": "gamma", "beta": 2.0}}}"#;
    assert_eq!(run("make-dist", cfg, &out, &[]).status.code(), Some(0));
    let spec = json(&out.join("spec.json"));
    assert_eq!(spec["psi"]["alpha"].as_f64().unwrap(), 1.0);
    assert!((spec["psi"]["period"].as_f64().unwrap() - 2f64.ln()).abs() < 1e-15);
    // phase reduced modulo 2π
    assert!((spec["psi"]["harmonics"][0]["phase"].as_f64().unwrap() - (7.0 - std::f64::consts::TAU)).abs() < 1e-12);
    assert_eq!(spec["phi"]["kind"], "gamma");
}

#[test]
fn eval_tables_have_headers_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("eval");
    let cfg = format!(r#"{{"dist": {{{FRECHET}}}, "x": [0.5, 1.0, 4.0], "u": [0.25, 0.75]}}"#);
    assert_eq!(run("eval", &cfg, &out, &[]).status.code(), Some(0));
    let cdf = fs::read_to_string(out.join("cdf.csv")).unwrap();
    let lines: Vec<&str> = cdf.lines().collect();
    assert_eq!(lines[0], "x,cdf");
    assert_eq!(lines.len(), 4);
    let v: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert!((v - (-1.0f64).exp()).abs() < 1e-15);
    let q = fs::read_to_string(out.join("quantile.csv")).unwrap();
    let x: f64 = q.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((x - 1.0 / 4f64.ln()).abs() < 1e-14);
}

#[test]
fn seed_flag_overrides_config_and_json_format() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(r#"{{"dist": {{{FRECHET}}}, "n": 50, "seed": 1, "format": "json"}}"#);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    run("sample", &cfg, &a, &[]);
    run("sample", &cfg, &b, &["--seed", "2"]);
    run("sample", &cfg, &c, &["--seed", "1", "--workers", "1"]);
    let read = |d: &Path| fs::read(d.join("samples.json")).unwrap();
    assert_ne!(read(&a), read(&b));
    assert_eq!(read(&a), read(&c));
    assert_eq!(json(&a.join("samples.json")).as_array().unwrap().len(), 50);
}

#[test]
fn sim_commands_write_long_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("ep");
    let cfg = format!(r#"{{"dist": {{{FRECHET}}}, "times": [1.0, 2.0], "n": 20, "seed": 3}}"#);
    run("sim-ep", &cfg, &out, &[]);
    let paths = fs::read_to_string(out.join("paths.csv")).unwrap();
    assert_eq!(paths.lines().next(), Some("replicate,time,value"));
    assert_eq!(paths.lines().count(), 1 + 40);
    let report = json(&out.join("report.json"));
    assert!(report["checks"].as_array().unwrap().iter().any(|c| c["check"] == "EP_marginal"));

    let out = dir.path().join("ar");
    let cfg = format!(
        r#"{{"rho": 0.5, "marginal": {{{FRECHET}}}, "length": 5, "burn_in": 0, "replicates": 100, "seed": 4, "checkpoints": [5]}}"#
    );
    run("sim-ar1", &cfg, &out, &[]);
    let series = fs::read_to_string(out.join("series.csv")).unwrap();
    assert_eq!(series.lines().next(), Some("replicate,n,value"));
    assert_eq!(series.lines().count(), 1 + 100 * 6);
    let names: Vec<String> = json(&out.join("report.json"))["checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["check"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(names, ["Eq8", "Thm31"]);
}

#[test]
fn ar1_variants_reject_misplaced_fields() {
    let dir = tempfile::tempdir().unwrap();
    let base = format!(r#""marginal": {{{FRECHET}}}, "length": 5, "replicates": 100, "seed": 4"#);
    let with_p = format!(r#"{{"rho": 0.5, "p": 0.5, {base}}}"#);
    let without_p = format!(r#"{{"rho": 0.5, {base}}}"#);
    assert_eq!(run("sim-ar1", &with_p, &dir.path().join("a"), &[]).status.code(), Some(1));
    assert_eq!(run("sim-ar1-mod", &without_p, &dir.path().join("b"), &[]).status.code(), Some(1));
    // p must equal 1/a for the modified scheme
    let wrong_p = format!(r#"{{"rho": 0.5, "p": 0.25, {base}}}"#);
    assert_eq!(run("sim-ar1-mod", &wrong_p, &dir.path().join("c"), &[]).status.code(), Some(1));
}

#[test]
fn failing_check_exits_two() {
    // Far-tail fixed start: the checkpoint at n = 0 cannot match the marginal.
    let dir = tempfile::tempdir().unwrap();
    let cfg = format!(
        r#"{{"rho": 0.5, "marginal": {{{FRECHET}}}, "length": 5, "burn_in": 0, "replicates": 200, "seed": 4,
            "checkpoints": [0], "init": {{"fixed": 1000.0}}}}"#
    );
    let out = dir.path().join("ar");
    let res = run("sim-ar1", &cfg, &out, &[]);
    assert_eq!(res.status.code(), Some(2));
    assert_eq!(json(&out.join("report.json"))["pass"], false);
}
