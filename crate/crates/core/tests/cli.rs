use std::fs;
use std::process::Command;

use serde_json::Value;

fn ladder() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ladder"))
}

#[test]
fn verify_writes_report_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let status = ladder()
        .args(["verify", "fristedt", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let report: Value = serde_json::from_str(&fs::read_to_string(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["experiment"], "fristedt");
    assert!(report["criteria"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    assert_eq!(report["config"]["seed"], report["seed"]);
    assert!(fs::read_to_string(dir.path().join("fristedt.csv")).unwrap().starts_with("law,alpha,beta"));
}

#[test]
fn json_format_skips_csv() {
    let dir = tempfile::tempdir().unwrap();
    let status = ladder()
        .args(["verify", "meander-ac", "--n-grid", "1,2,3", "--format", "json", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    assert!(dir.path().join("report.json").exists());
    assert!(!dir.path().join("meander_ac.csv").exists());
}

#[test]
fn tolerance_failure_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = ladder()
        .args(["verify", "idloc", "--n-grid", "3,4", "--trials", "100", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL lattice_violations"));
}

#[test]
fn hypothesis_violation_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(
        &cfg,
        r#"{"experiment":"theorem1","law":{"kind":"lattice","support":["1"],"probs":["1"]},
            "n_grid":[16,32],"trials":100,"seed":1}"#,
    )
    .unwrap();
    let status = ladder()
        .args(["converge", "theorem1", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(dir.path().join("o"))
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn bad_grid_and_mismatched_config_are_errors() {
    let dir = tempfile::tempdir().unwrap();
    let out = ladder()
        .args(["converge", "harmonic", "--n-grid", "8,4", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("strictly increasing"));
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, serde_json::to_string(&ladder::experiments::ExperimentConfig::default_for(
        ladder::experiments::ExperimentId::Harmonic,
    )).unwrap())
    .unwrap();
    let out = ladder().args(["verify", "fristedt", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let status = ladder()
            .args(["converge", "localtime", "--n-grid", "16,32,64", "--trials", "100", "--seed", "7", "--out"])
            .arg(d.path())
            .status()
            .unwrap();
        assert!(status.code().is_some());
    }
    let read = |d: &tempfile::TempDir| fs::read(d.path().join("discrepancy.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}

#[test]
fn simulate_and_tables() {
    let dir = tempfile::tempdir().unwrap();
    let status = ladder()
        .args(["simulate", "--length", "50", "--law", r#"{"kind":"lattice","support":["-1","1"],"probs":["1/2","1/2"]}"#, "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    for f in ["path.csv", "transform.csv", "local_time.csv", "ladder.csv"] {
        let text = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(text.lines().count() > 1, "{f}");
    }
    assert_eq!(fs::read_to_string(dir.path().join("path.csv")).unwrap().lines().count(), 52);
    let status = ladder().arg("tables").arg("--out").arg(dir.path()).status().unwrap();
    assert_eq!(status.code(), Some(0));
    let norming = fs::read_to_string(dir.path().join("norming.csv")).unwrap();
    assert_eq!(norming.lines().count(), 15);
}
