//! End-to-end runs of the binary: exit codes, artifact layout, and
//! reproducibility. Numerical depth lives in the acceptance suite; these
//! tests keep the process-level contract honest.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fresh_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("kdvflat-{}-{}", tag, std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).expect("create temp dir");
    dir
}

fn run_in(dir: &Path, config: &str) -> (Output, PathBuf) {
    let cfg_path = dir.join("config.json");
    fs::write(&cfg_path, config).expect("write config");
    let out_dir = dir.join("out");
    let output = Command::new(env!("CARGO_BIN_EXE_kdvflat"))
        .arg("--config")
        .arg(&cfg_path)
        .arg("--out-dir")
        .arg(&out_dir)
        .arg("--quiet")
        .output()
        .expect("spawn binary");
    (output, out_dir)
}

fn run(tag: &str, config: &str) -> (Output, PathBuf) {
    let dir = fresh_dir(tag);
    run_in(&dir, config)
}

fn report(out_dir: &Path) -> serde_json::Value {
    let text = fs::read_to_string(out_dir.join("report.json")).expect("read report");
    serde_json::from_str(&text).expect("parse report")
}

fn field(v: &serde_json::Value, key: &str) -> f64 {
    v[key].as_f64().unwrap_or_else(|| panic!("missing numeric field {key}"))
}

#[test]
fn null_control_on_finite_differences_emits_artifacts() {
    let cfg = r#"{
        "command": "null-control", "a": 1.0, "t_final": 1.0, "tau": 0.5,
        "discretization": {"scheme": "finite-difference", "n_x": 32, "n_t": 200},
        "y0": {"kind": "sin-pi"}
    }"#;
    let (out, dir) = run("nc-fd", cfg);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    for name in ["u.csv", "state_snapshots.csv", "gentable.json", "report.json"] {
        assert!(dir.join(name).is_file(), "missing artifact {name}");
    }
    let rep = report(&dir);
    assert_eq!(rep["schema_version"], 1);
    assert_eq!(rep["command"], "null-control");
    let rel = field(&rep, "final_rel_norm");
    assert!(rel < 0.5, "final relative norm {rel} not reduced");
    let u_head = fs::read_to_string(dir.join("u.csv")).unwrap();
    assert!(u_head.starts_with("t,u\n"), "u.csv header");
}

#[test]
fn identical_configs_produce_identical_artifacts() {
    let cfg = r#"{
        "command": "null-control", "a": 0.0, "t_final": 1.0, "tau": 0.5,
        "discretization": {"scheme": "finite-difference", "n_x": 32, "n_t": 200},
        "y0": {"kind": "sin-pi"}
    }"#;
    let (out_a, dir_a) = run("repro-a", cfg);
    let (out_b, dir_b) = run("repro-b", cfg);
    assert!(out_a.status.success() && out_b.status.success());
    let u_a = fs::read(dir_a.join("u.csv")).unwrap();
    let u_b = fs::read(dir_b.join("u.csv")).unwrap();
    assert_eq!(u_a, u_b, "control samples differ between identical runs");
    // reports embed their own output paths; everything else must match
    let mut rep_a = report(&dir_a);
    let mut rep_b = report(&dir_b);
    rep_a.as_object_mut().unwrap().remove("files");
    rep_b.as_object_mut().unwrap().remove("files");
    assert_eq!(rep_a, rep_b, "report payloads differ between identical runs");
}

#[test]
fn invalid_drift_exits_with_config_code() {
    let cfg = r#"{"command": "simulate", "a": -1.0}"#;
    let (out, dir) = run("bad-a", cfg);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.join("report.json").exists(), "no report on config error");
}

#[test]
fn unknown_config_field_is_rejected() {
    let cfg = r#"{"command": "simulate", "a": 1.0, "bogus": 3}"#;
    let (out, _) = run("bad-field", cfg);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn reach_without_target_is_rejected() {
    let cfg = r#"{"command": "reach", "a": 0.0}"#;
    let (out, _) = run("no-target", cfg);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_suite_passes_with_small_sweep() {
    let cfg = r#"{"command": "verify", "a": 1.0, "n_samples": 60}"#;
    let (out, dir) = run("verify", cfg);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&dir);
    assert_eq!(rep["all_pass"], true);
    assert_eq!(rep["properties"].as_array().unwrap().len(), 13);
}

#[test]
fn reach_x2_round_trip_is_exact() {
    let cfg = r#"{
        "command": "reach", "a": 0.0, "t_final": 1.0,
        "target": {"kind": "named", "name": "x2"}
    }"#;
    let (out, dir) = run("reach-x2", cfg);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let rep = report(&dir);
    assert!(field(&rep, "roundtrip_defect") <= 1e-10);
    assert!(field(&rep, "max_final_error") <= 1e-3);
    assert!(dir.join("final_state.csv").is_file());
}

#[test]
fn simulate_zero_data_stays_zero() {
    let cfg = r#"{"command": "simulate", "a": 1.0, "y0": {"kind": "zero"}}"#;
    let (out, dir) = run("sim-zero", cfg);
    assert!(out.status.success());
    let rep = report(&dir);
    assert_eq!(field(&rep, "final_norm"), 0.0);
    assert_eq!(field(&rep, "dissipation"), 0.0);
}

#[test]
fn airy_report_pins_kernel_constant() {
    let cfg = r#"{"command": "airy", "a": 0.0}"#;
    let (out, dir) = run("airy", cfg);
    assert!(out.status.success());
    let rep = report(&dir);
    assert!((field(&rep, "kernel_origin") - 0.3550280538878172).abs() <= 1e-12);
    assert!(field(&rep, "mass_defect") <= 1e-4);
}
