//! Run orchestration: data generation, integration, persistence and
//! criteria evaluation.

use std::path::{Path, PathBuf};

use serde::Serialize;
use sqg_core::criteria::{
    calibrate_c0, prop_evaluate, prop_quantities, thm1_evaluate, thm2_monitor, thm3_monitor, thm4_monitor, thm5_monitor,
    C0Calibration, CalibrationConstants, Constant, CriteriaReport, TheoremId,
};
use sqg_core::evolution::{evolve, evolve_with_sink, twin_evolve, TrajectoryRecord, TwinRecord};
use sqg_core::littlewood_paley::{sobolev_norm, FilterBank};
use sqg_core::spectral::{rescale_solution, SpectralField};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::plots;
use crate::recipe::generate;
use crate::store::{self, DirSink, TwinMeta};

/// ChaCha stream of the first member's data.
pub const DATA_STREAM: u64 = 0;
/// ChaCha stream of the twin perturbation.
pub const PERTURBATION_STREAM: u64 = 1;

pub struct SimulationOutcome {
    pub dir: PathBuf,
    pub record: TrajectoryRecord,
    pub reports: Vec<CriteriaReport>,
}

impl SimulationOutcome {
    pub fn integrator_failed(&self) -> bool {
        self.record.failure.is_some()
    }
}

pub struct TwinOutcome {
    pub dir: PathBuf,
    pub record: TwinRecord,
    pub reports: Vec<CriteriaReport>,
}

pub fn initial_data(cfg: &RunConfig) -> Result<SpectralField> {
    generate(&cfg.data, cfg.grid_spec()?, cfg.seed, DATA_STREAM)
}

/// Integrates the configured data and writes the run directory. Criteria
/// whose inputs are configured (T_*, γ) are evaluated and stored.
pub fn simulate(cfg: &RunConfig, dir: &Path) -> Result<SimulationOutcome> {
    cfg.validate()?;
    let theta0 = initial_data(cfg)?;
    store::save_config(dir, cfg)?;
    store::save_checkpoint(&dir.join(store::INITIAL), &theta0, cfg.physics.alpha, 0.0)?;
    let mut sink = DirSink::new(dir, cfg.physics.alpha);
    let record = evolve_with_sink(&theta0, &cfg.stepper_config(), &cfg.probe_schedule(), &mut sink)?;
    store::save_trajectory(dir, &record)?;
    let mut reports = Vec::new();
    if cfg.analysis.t_star.is_some() {
        reports.push(evaluate(dir, TheoremId::Thm1)?);
    }
    if cfg.analysis.gamma.is_some() {
        reports.push(evaluate(dir, TheoremId::Prop)?);
    }
    if cfg.plots {
        plots::emit_plots(dir)?;
    }
    Ok(SimulationOutcome { dir: dir.to_path_buf(), record, reports })
}

/// Runs the twin pair (θ₀, θ₀ + perturbation) and stores both uniqueness
/// reports.
pub fn twin(cfg: &RunConfig, dir: &Path) -> Result<TwinOutcome> {
    cfg.validate()?;
    let (Some(tw), Some(schedule)) = (&cfg.twin, cfg.twin_schedule()) else {
        return Err(Error::Config(vec!["twin: section missing".into()]));
    };
    let grid = cfg.grid_spec()?;
    let first = initial_data(cfg)?;
    let second = &first + &generate(&tw.perturbation, grid, cfg.seed, PERTURBATION_STREAM)?;
    store::save_config(dir, cfg)?;
    let record = twin_evolve(&first, &second, &cfg.stepper_config(), &schedule)?;
    store::write_file(&dir.join(store::TWIN), &store::twin_csv(&record.rows)?)?;
    let meta = TwinMeta {
        grid,
        diverged: record.diverged,
        steps: record.steps,
    };
    store::write_file(&dir.join(store::TWIN_META), serde_json::to_string_pretty(&meta)?.as_bytes())?;
    let reports = vec![
        twin_report(&record.rows, cfg, TheoremId::Thm4)?,
        twin_report(&record.rows, cfg, TheoremId::Thm5)?,
    ];
    for r in &reports {
        store::save_report(dir, r)?;
    }
    if cfg.plots {
        plots::emit_plots(dir)?;
    }
    Ok(TwinOutcome { dir: dir.to_path_buf(), record, reports })
}

fn twin_report(rows: &[sqg_core::evolution::TwinRow], cfg: &RunConfig, theorem: TheoremId) -> Result<CriteriaReport> {
    let schedule = cfg
        .twin_schedule()
        .ok_or_else(|| Error::Config(vec!["twin: section missing".into()]))?;
    Ok(match theorem {
        TheoremId::Thm4 => thm4_monitor(rows, &schedule)?,
        _ => thm5_monitor(rows, &schedule, cfg.physics.alpha)?,
    })
}

fn need<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::Config(vec![format!("analysis: {name} is required for this criterion")]))
}

/// Evaluates one criterion from the persisted run directory and stores the
/// report under `reports/`.
pub fn evaluate(dir: &Path, theorem: TheoremId) -> Result<CriteriaReport> {
    let cfg = store::load_config(dir)?;
    let a = &cfg.analysis;
    let alpha = cfg.physics.alpha;
    let report = match theorem {
        TheoremId::Thm4 | TheoremId::Thm5 => twin_report(&store::load_twin_rows(dir)?, &cfg, theorem)?,
        TheoremId::Thm1 | TheoremId::Prop => {
            let theta0 = store::load_checkpoint(&dir.join(store::INITIAL))?.field;
            let bank = FilterBank::new(*theta0.grid());
            let record = store::load_trajectory(dir).ok();
            if theorem == TheoremId::Thm1 {
                thm1_evaluate(&bank, &theta0, a.s, alpha, need(a.t_star, "t_star")?, &cfg.constants, record.as_ref())?
            } else {
                let gamma = need(a.gamma, "gamma")?;
                let record = match (record, check_time(&cfg, &theta0, gamma)) {
                    (Some(rec), Some(t)) if !probed_at(&rec, t) => Some(run_to(&cfg, &theta0, t)?),
                    (rec, _) => rec,
                };
                prop_evaluate(&bank, &theta0, a.s, alpha, gamma, &cfg.constants, record.as_ref())?
            }
        }
        TheoremId::Thm2 | TheoremId::Thm3 => {
            let mut record = store::load_trajectory(dir)?;
            store::attach_fields(dir, &mut record)?;
            if theorem == TheoremId::Thm2 {
                thm2_monitor(
                    &record,
                    a.s,
                    alpha,
                    a.c_star_upper.unwrap_or(cfg.constants.c0.value),
                    a.blowup_prefactor.unwrap_or(1.0),
                    &cfg.constants,
                )?
            } else {
                thm3_monitor(&record, a.s, alpha, &cfg.constants)?
            }
        }
    };
    store::save_report(dir, &report)?;
    Ok(report)
}

/// t_check of the smallness proposition, when its inputs are admissible.
fn check_time(cfg: &RunConfig, theta0: &SpectralField, gamma: f64) -> Option<f64> {
    let (s, alpha) = (cfg.analysis.s, cfg.physics.alpha);
    let h = sobolev_norm(theta0, s).ok().filter(|h| *h > 0.0)?;
    prop_quantities(h, s, alpha, gamma, cfg.constants.cprop.value)
        .ok()
        .map(|q| q.t_check)
}

fn probed_at(record: &TrajectoryRecord, t: f64) -> bool {
    let tol = 1e-9 * t.max(1.0);
    record.entries.iter().any(|e| (e.time - t).abs() <= tol)
}

/// Integrates from θ₀ to exactly `t` with the configured stepper, probing
/// only at the end.
fn run_to(cfg: &RunConfig, theta0: &SpectralField, t: f64) -> Result<TrajectoryRecord> {
    let mut stepper = cfg.stepper_config();
    stepper.t_end = t;
    stepper.checkpoint_every = None;
    let mut schedule = cfg.probe_schedule();
    schedule.every = t;
    Ok(evolve(theta0, &stepper, &schedule)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct CalibrationOutput {
    pub run_id: String,
    pub calibration: C0Calibration,
    pub constants: CalibrationConstants,
}

/// Calibrates C₀ on the configured family and writes `calibration.json`
/// and `constants.toml` (the configured constants with C₀ replaced).
pub fn calibrate(cfg: &RunConfig, dir: &Path) -> Result<CalibrationOutput> {
    cfg.validate()?;
    let (Some(cal), Some(settings)) = (&cfg.calibration, cfg.calibration_settings()) else {
        return Err(Error::Config(vec!["calibration: section missing".into()]));
    };
    let base = initial_data(cfg)?;
    let family = if cal.rescale.is_empty() {
        cal.amplitudes.iter().map(|a| base.scaled(*a)).collect::<Vec<_>>()
    } else {
        cal.rescale
            .iter()
            .map(|l| rescale_solution(&base, *l, cfg.physics.alpha))
            .collect::<sqg_core::Result<Vec<_>>>()?
    };
    let calibration = calibrate_c0(&family, cfg.analysis.s, cfg.physics.alpha, &settings)?;
    let run_id = dir
        .file_name()
        .map_or_else(|| format!("seed-{}", cfg.seed), |n| n.to_string_lossy().into_owned());
    let mut constants = cfg.constants.clone();
    constants.c0 = Constant::calibrated(calibration.c0, run_id.clone());
    store::save_config(dir, cfg)?;
    store::write_file(
        &dir.join("calibration.json"),
        serde_json::to_string_pretty(&calibration)?.as_bytes(),
    )?;
    store::write_file(
        &dir.join("constants.toml"),
        toml::to_string(&constants).expect("constants serialize").as_bytes(),
    )?;
    Ok(CalibrationOutput {
        run_id,
        calibration,
        constants,
    })
}
