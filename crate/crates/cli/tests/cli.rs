use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn alphaflow(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_alphaflow"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("spawn alphaflow")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(v).unwrap()).unwrap();
    p.to_str().unwrap().to_string()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn shear_run(model: &str, alpha: f64) -> Value {
    json!({
        "simulation": {
            "model": model,
            "nu_viscosity": 1.0,
            "alpha_length": alpha,
            "box_length": std::f64::consts::TAU,
            "resolution": 16,
            "horizon_time": 1.0,
            "dt_time": 1e-3,
            "initial": { "kind": "shear", "amplitude": 1.0 },
            "samples": 10
        }
    })
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(2)
        .map(|l| l.split(',').map(|x| x.parse().unwrap()).collect())
        .collect()
}

#[test]
fn shear_run_decays_exactly() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_json(tmp.path(), "shear.json", &shear_run("leray_alpha", 0.1));
    let o = alphaflow(&["run", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = fs::read_to_string(tmp.path().join("out/trajectory.csv")).unwrap();
    assert!(text.starts_with("# alphaflow trajectory csv v1"));
    assert_eq!(
        text.lines().nth(1).unwrap(),
        "t,l2_norm,h1_norm,h2_norm,model_energy,balance_residual"
    );
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 11);
    let u0 = rows[0][1];
    // |u0| for (sin y, 0) on [0, 2 pi]^2 is sqrt(2) pi.
    assert!((u0 - std::f64::consts::PI * 2f64.sqrt()).abs() < 1e-12);
    for r in &rows {
        let exact = (-r[0]).exp() * u0;
        assert!(
            (r[1] - exact).abs() / exact < 1e-8,
            "t = {}: {} vs {exact}",
            r[0],
            r[1]
        );
    }
    let report = read_json(&tmp.path().join("out/bounds.json"));
    assert_eq!(report["pass"], Value::Bool(true));
    let manifest = read_json(&tmp.path().join("out/manifest.json"));
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["exit_code"], 0);
    assert_eq!(manifest["steps"], 1000);
}

#[test]
fn wide_filter_is_a_hypothesis_failure() {
    let tmp = TempDir::new().unwrap();
    let cfg = write_json(tmp.path(), "wide.json", &shear_run("leray_alpha", 2.0));
    let o = alphaflow(&["run", "--config", &cfg, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    let manifest = read_json(&tmp.path().join("out/manifest.json"));
    assert_eq!(manifest["status"], "failed");
    assert_eq!(manifest["exit_code"], 3);

    let mut unchecked = shear_run("leray_alpha", 2.0);
    unchecked["check_bounds"] = Value::Bool(false);
    let cfg = write_json(tmp.path(), "wide_unchecked.json", &unchecked);
    let o = alphaflow(&["run", "--config", &cfg, "--out", "out2"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(!tmp.path().join("out2/bounds.json").exists());
}

#[test]
fn repeated_runs_are_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "simulation": {
            "model": "ns_alpha",
            "nu_viscosity": 0.1,
            "alpha_length": 0.25,
            "box_length": std::f64::consts::TAU,
            "resolution": 16,
            "horizon_time": 0.2,
            "dt_time": 1e-2,
            "initial": { "kind": "random", "exponent": 4.0, "rms_velocity": 0.2 },
            "forcing": { "kind": "shell", "k2": 4, "amplitude": 0.1 },
            "seed": 3,
            "samples": 4
        }
    });
    let p = write_json(tmp.path(), "rand.json", &cfg);
    let a = alphaflow(
        &["run", "--config", &p, "--out", "a", "--parallel", "1"],
        tmp.path(),
    );
    let b = alphaflow(
        &["run", "--config", &p, "--out", "b", "--parallel", "3"],
        tmp.path(),
    );
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(b.status.code(), Some(0), "{}", stderr(&b));
    let ta = fs::read(tmp.path().join("a/trajectory.csv")).unwrap();
    let tb = fs::read(tmp.path().join("b/trajectory.csv")).unwrap();
    assert_eq!(ta, tb);
    let c = alphaflow(
        &["run", "--config", &p, "--out", "c", "--seed", "4"],
        tmp.path(),
    );
    assert_eq!(c.status.code(), Some(0));
    assert_ne!(ta, fs::read(tmp.path().join("c/trajectory.csv")).unwrap());
    let manifest = read_json(&tmp.path().join("c/manifest.json"));
    assert_eq!(manifest["seed"], 4);
    assert_eq!(manifest["config"]["simulation"]["seed"], 4);
}

#[test]
fn invalid_configs_name_the_field() {
    let tmp = TempDir::new().unwrap();
    let mut bad = shear_run("nse", 0.0);
    bad["simulation"]["nu_viscosity"] = json!(-1.0);
    let p = write_json(tmp.path(), "neg.json", &bad);
    let o = alphaflow(&["run", "--config", &p, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("nu_viscosity"), "{}", stderr(&o));

    let mut typo = shear_run("nse", 0.0);
    typo["simulation"]["viscosity"] = json!(1.0);
    let p = write_json(tmp.path(), "typo.json", &typo);
    let o = alphaflow(&["run", "--config", &p, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("viscosity"), "{}", stderr(&o));

    let o = alphaflow(&["run", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = alphaflow(&["frobnicate"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn blow_up_is_a_numeric_abort() {
    let tmp = TempDir::new().unwrap();
    let cfg = json!({
        "simulation": {
            "model": "nse",
            "nu_viscosity": 1e-6,
            "box_length": std::f64::consts::TAU,
            "resolution": 16,
            "horizon_time": 100.0,
            "dt_time": 0.5,
            "initial": { "kind": "random", "exponent": 4.0, "rms_velocity": 1e6 },
            "samples": 1
        },
        "check_bounds": false
    });
    let p = write_json(tmp.path(), "boom.json", &cfg);
    let o = alphaflow(&["run", "--config", &p, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
    assert!(stderr(&o).contains("non-finite"), "{}", stderr(&o));
}

fn small_galerkin() -> Value {
    json!({
        "kind": "galerkin",
        "base": {
            "model": "leray_alpha",
            "nu_viscosity": 0.1,
            "alpha_length": 0.2,
            "box_length": std::f64::consts::TAU,
            "resolution": 32,
            "horizon_time": 1.0,
            "dt_time": 0.01,
            "initial": { "kind": "random", "exponent": 4.0, "rms_velocity": 0.2 },
            "seed": 20240601,
            "samples": 8
        },
        "values": [2.0, 4.0, 8.0, 16.0]
    })
}

#[test]
fn galerkin_sweep_writes_artifacts() {
    let tmp = TempDir::new().unwrap();
    let p = write_json(tmp.path(), "g.json", &small_galerkin());
    let o = alphaflow(
        &["sweep", "galerkin", "--config", &p, "--out", "out", "--svg"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let summary = read_json(&tmp.path().join("out/sweep.json"));
    assert_eq!(summary["pass"], Value::Bool(true));
    let curve = &summary["curves"][0];
    assert!(curve["fit"]["order"].as_f64().unwrap() >= 1.0);
    assert_eq!(curve["bound_pass"], Value::Bool(true));
    let csv = fs::read_to_string(tmp.path().join("out/sweep.csv")).unwrap();
    assert!(csv.starts_with("# alphaflow sweep csv v1 kind=galerkin"));
    assert_eq!(csv.lines().count(), 6);
    let svg = fs::read_to_string(tmp.path().join("out/sweep.svg")).unwrap();
    assert!(svg.starts_with("<svg"));
    let manifest = read_json(&tmp.path().join("out/manifest.json"));
    assert_eq!(manifest["command"], "sweep galerkin");
    assert_eq!(manifest["status"], "ok");

    let again = alphaflow(
        &[
            "sweep",
            "galerkin",
            "--config",
            &p,
            "--out",
            "again",
            "--parallel",
            "1",
        ],
        tmp.path(),
    );
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(
        fs::read(tmp.path().join("out/sweep.csv")).unwrap(),
        fs::read(tmp.path().join("again/sweep.csv")).unwrap()
    );
}

#[test]
fn sweep_usage_errors() {
    let tmp = TempDir::new().unwrap();
    let mut empty = small_galerkin();
    empty["values"] = json!([]);
    let p = write_json(tmp.path(), "empty.json", &empty);
    let o = alphaflow(
        &["sweep", "galerkin", "--config", &p, "--out", "out"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("values"), "{}", stderr(&o));

    let p = write_json(tmp.path(), "g.json", &small_galerkin());
    let o = alphaflow(
        &["sweep", "alpha", "--config", &p, "--out", "out"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(2));
    let o = alphaflow(&["sweep", "sideways", "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

fn small_identities() -> Value {
    json!({ "resolution": 16, "trials": 10, "bg_fields": 40, "filter_pairs": 2 })
}

#[test]
fn identities_pass_and_aliasing_fails() {
    let tmp = TempDir::new().unwrap();
    let p = write_json(tmp.path(), "id.json", &small_identities());
    let o = alphaflow(&["identities", "--config", &p, "--out", "ok"], tmp.path());
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = read_json(&tmp.path().join("ok/identities.json"));
    assert_eq!(r["pass"], Value::Bool(true));
    assert_eq!(r["suite"]["identities"].as_array().unwrap().len(), 5);

    let o = alphaflow(
        &["identities", "--config", &p, "--out", "bad", "--aliased"],
        tmp.path(),
    );
    assert_eq!(o.status.code(), Some(5), "{}", stderr(&o));
    let err = stderr(&o);
    assert!(err.contains("violated") && err.contains("seed 1"), "{err}");
}

#[test]
fn zero_trials_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let mut cfg = small_identities();
    cfg["trials"] = json!(0);
    let p = write_json(tmp.path(), "zero.json", &cfg);
    let o = alphaflow(&["identities", "--config", &p, "--out", "out"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(!tmp.path().join("out/manifest.json").exists());
}
