use std::fs;
use std::process::Command;

fn femtosim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_femtosim"))
}

#[test]
fn validate_rejects_bad_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "[system]\nn_prbs_femto = 200\n").unwrap();
    let out = femtosim()
        .arg("validate")
        .arg("--config")
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("n_prbs_femto"));
}

#[test]
fn validate_accepts_defaults() {
    let out = femtosim()
        .args(["validate", "--seed", "9", "--mode", "sinr"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["system"]["master_seed"], 9);
    assert_eq!(v["system"]["eval_mode"], "sinr");
}

#[test]
fn bad_mode_is_a_usage_error() {
    let out = femtosim()
        .args(["validate", "--mode", "fast"])
        .output()
        .unwrap();
    assert!(!out.status.success());
}

#[test]
fn run_and_trial_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("c.csv");
    let common = [
        "--set",
        "cell_radius_m=30",
        "--set",
        "n_topologies=2",
        "--set",
        "n_channel_draws=1",
        "--jobs",
        "2",
    ];
    let out = femtosim()
        .arg("run")
        .args(common)
        .arg("--out")
        .arg(&csv)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(fs::read_to_string(&csv).unwrap().lines().count(), 2);

    let json = dir.path().join("t.json");
    let out = femtosim()
        .arg("trial")
        .args(common)
        .args(["--topology", "1", "--demand", "2e6", "--out"])
        .arg(&json)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    assert_eq!(v["config"]["demand_bps"], 2e6);
}
