mod common;

use sqg_core::criteria::{Outcome, TheoremId};
use sqg_harness::store::{self, Table};
use sqg_harness::{plots, run, Error, RunConfig};

#[test]
fn linear_heat_run_has_decreasing_hs_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(common::LINEAR_HEAT).unwrap();
    run::simulate(&cfg, dir.path()).unwrap();
    let hs = Table::read(&dir.path().join(store::TRAJECTORY)).unwrap().column("hs").unwrap();
    assert_eq!(hs.len(), 11);
    assert!(hs.windows(2).all(|w| w[1] < w[0]), "{hs:?}");
}

#[test]
fn identical_twin_recipe_gives_zero_w_columns() {
    let dir = tempfile::tempdir().unwrap();
    let text = common::TWIN.replace("amplitude = 1e-6", "amplitude = 0.0");
    let cfg = RunConfig::parse(&text).unwrap();
    let out = run::twin(&cfg, dir.path()).unwrap();
    let table = Table::read(&dir.path().join(store::TWIN)).unwrap();
    for col in ["w_l2", "thm4_low", "thm4_high", "w_lp", "w_lp_pow", "thm5_low", "thm5_high"] {
        assert!(table.column(col).unwrap().iter().all(|v| *v == 0.0), "{col}");
    }
    assert!(out.reports.iter().all(|r| r.outcome == Outcome::Vacuous));
}

#[test]
fn smallness_report_matches_an_independent_rerun() {
    let text = common::LINEAR_HEAT
        .replace("mode = \"linear-heat\"\n", "")
        .replace("s = 1.6\nprobe", "s = 1.6\ngamma = 0.5\nprobe");
    let cfg = RunConfig::parse(&text).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let first = run::simulate(&cfg, a.path()).unwrap();
    let second = run::simulate(&cfg, b.path()).unwrap();
    assert_eq!(first.reports.len(), 1);
    assert_eq!(first.reports[0].to_json(), second.reports[0].to_json());
    for name in [store::TRAJECTORY, store::SHELLS] {
        assert_eq!(
            std::fs::read(a.path().join(name)).unwrap(),
            std::fs::read(b.path().join(name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn ratio_plot_crossing_matches_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig::parse(common::TWIN_CROSSING).unwrap();
    let out = run::twin(&cfg, dir.path()).unwrap();
    let report = out.reports.iter().find(|r| r.theorem == TheoremId::Thm5).unwrap();
    let summary = plots::emit_plots(dir.path()).unwrap();
    let crossing = report.get("first_crossing").unwrap();
    assert!(crossing > 0.0 && crossing.is_finite(), "crossing at {crossing}");
    assert_eq!(summary.crossing, Some(crossing));
    assert!(dir.path().join("plots/ratios.svg").exists());
}

#[test]
fn empty_trajectory_plots_nothing() {
    let dir = tempfile::tempdir().unwrap();
    store::write_file(&dir.path().join(store::TRAJECTORY), b"time,step,hs,tail,checkpoint\n").unwrap();
    let summary = plots::emit_plots(dir.path()).unwrap();
    assert!(summary.files.is_empty());
    assert!(summary.message.unwrap().contains("nothing to plot"));
}

#[test]
fn missing_columns_are_named() {
    let dir = tempfile::tempdir().unwrap();
    store::write_file(&dir.path().join(store::TRAJECTORY), b"time,step\n0,0\n").unwrap();
    match plots::emit_plots(dir.path()) {
        Err(Error::MissingColumns { columns, .. }) => assert_eq!(columns, vec!["hs".to_string()]),
        other => panic!("expected missing-column error, got {other:?}"),
    }
}

#[test]
fn plotting_without_csv_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    assert!(matches!(plots::emit_plots(dir.path()), Err(Error::File { .. })));
}

#[test]
fn single_probe_run_plots_single_points() {
    let dir = tempfile::tempdir().unwrap();
    let text = common::LINEAR_HEAT.replace("t_end = 0.5", "t_end = 0.0");
    let cfg = RunConfig::parse(&text).unwrap();
    run::simulate(&cfg, dir.path()).unwrap();
    let summary = plots::emit_plots(dir.path()).unwrap();
    assert_eq!(summary.files.len(), 2);
    assert!(summary.message.is_none());
    assert!(summary.files.iter().all(|f| f.exists()));
}
