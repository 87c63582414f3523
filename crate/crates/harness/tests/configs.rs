use std::path::{Path, PathBuf};

use sqg_harness::{run, RunConfig};

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut out: Vec<PathBuf> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    out.sort();
    out
}

#[test]
fn shipped_configs_parse_and_round_trip() {
    let paths = configs();
    assert!(paths.len() >= 5);
    for path in paths {
        let cfg = RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        assert_eq!(RunConfig::parse(&cfg.to_toml()).unwrap(), cfg, "{}", path.display());
    }
}

#[test]
fn shipped_calibration_recovers_the_scaling_slope() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/calibrate.toml");
    let cfg = RunConfig::load(&path).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let out = run::calibrate(&cfg, dir.path()).unwrap();
    assert!(out.calibration.members.iter().all(|m| m.doubling_time.is_some()));
    assert!(out.calibration.slope_error().unwrap() < 0.1);
    let saved: sqg_core::criteria::CalibrationConstants =
        toml::from_str(&std::fs::read_to_string(dir.path().join("constants.toml")).unwrap()).unwrap();
    assert_eq!(saved.c0, out.constants.c0);
}
