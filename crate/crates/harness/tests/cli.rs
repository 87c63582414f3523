mod common;

use std::path::Path;
use std::process::Command;

fn sqg(root: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sqg"))
        .args(args)
        .env("SQG_OUTPUT_ROOT", root)
        .output()
        .unwrap()
}

#[test]
fn simulate_writes_under_output_root() {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("heat.toml");
    std::fs::write(&config, common::LINEAR_HEAT).unwrap();
    let out = sqg(root.path(), &["simulate", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(root.path().join("heat").join("trajectory.csv").exists());
}

#[test]
fn invalid_config_exits_with_code_2_listing_problems() {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("bad.toml");
    let text = common::LINEAR_HEAT.replace("n = 32", "n = 30").replace("alpha = 0.25", "alpha = 2.0");
    std::fs::write(&config, text).unwrap();
    let out = sqg(root.path(), &["simulate", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("grid") && err.contains("alpha"), "{err}");
}

#[test]
fn vacuous_criterion_exits_with_code_4() {
    let root = tempfile::tempdir().unwrap();
    let config = root.path().join("same.toml");
    std::fs::write(&config, common::TWIN.replace("amplitude = 1e-6", "amplitude = 0.0")).unwrap();
    let out = sqg(root.path(), &["twin", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let run_dir = root.path().join("same");
    let out = sqg(root.path(), &["criteria", run_dir.to_str().unwrap(), "--theorem", "4"]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("\"outcome\""));
}

#[test]
fn unknown_theorem_is_rejected() {
    let root = tempfile::tempdir().unwrap();
    let out = sqg(root.path(), &["criteria", ".", "--theorem", "7"]);
    assert_eq!(out.status.code(), Some(2));
}
