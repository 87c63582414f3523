//! Declarative run configuration (TOML).

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sqg_core::criteria::{check_subcritical_range, CalibrationConstants, CalibrationSettings};
use sqg_core::evolution::{BlowupPolicy, DtPolicy, Mode, ProbeSchedule, StepperConfig, TwinSchedule};
use sqg_core::littlewood_paley::NormRequest;
use sqg_core::spectral::{GridSpec, DEFAULT_DEALIAS};

use crate::error::{Error, Result};
use crate::recipe::DataRecipe;

/// Environment variable naming the default output root.
pub const OUTPUT_ROOT_VAR: &str = "SQG_OUTPUT_ROOT";

fn default_box() -> f64 {
    std::f64::consts::TAU
}

fn default_dealias() -> f64 {
    DEFAULT_DEALIAS
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub n: usize,
    #[serde(default = "default_box")]
    pub box_length: f64,
    #[serde(default = "default_dealias")]
    pub dealias: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhysicsConfig {
    pub alpha: f64,
}

fn default_lp() -> Vec<f64> {
    NormRequest::default().lp
}

fn default_multiple() -> f64 {
    BlowupPolicy::default().hs_multiple
}

fn default_tail() -> f64 {
    BlowupPolicy::default().tail_fraction
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Index of the monitored Ḣ^s norm.
    pub s: f64,
    pub probe_every: f64,
    #[serde(default = "default_lp")]
    pub lp: Vec<f64>,
    /// Extra Ḣ^s indices recorded at each probe.
    #[serde(default)]
    pub sobolev: Vec<f64>,
    /// (s, p) pairs of Ḃ^s_{p,∞} norms recorded at each probe.
    #[serde(default)]
    pub besov: Vec<(f64, f64)>,
    #[serde(default = "default_multiple")]
    pub hs_multiple: f64,
    #[serde(default = "default_tail")]
    pub tail_fraction: f64,
    #[serde(default = "yes")]
    pub stop_on_flag: bool,
    /// T_* of the sparseness regularity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t_star: Option<f64>,
    /// γ of the smallness check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    /// Upper Type-1 constant.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_star_upper: Option<f64>,
    /// Prefactor in 2^{2αJ} = prefactor/(T_max − t).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub blowup_prefactor: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StepperSection {
    pub t_end: f64,
    pub dt: DtPolicy,
    #[serde(default)]
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checkpoint_every: Option<f64>,
}

fn default_q_inf() -> f64 {
    f64::INFINITY
}

fn default_two() -> f64 {
    2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwinConfig {
    /// Added to the first member's data to form the second.
    pub perturbation: DataRecipe,
    /// Fixed cutoff of the high/low ratio.
    pub j: i32,
    #[serde(default = "default_two")]
    pub q: f64,
    #[serde(default = "default_two")]
    pub p_dynamic: f64,
    #[serde(default = "default_q_inf")]
    pub q_dynamic: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationConfig {
    /// Dyadic factors λ; member i is the rescaled data θ_λ.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rescale: Vec<f64>,
    /// Amplitude factors; member i is a·θ₀.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub amplitudes: Vec<f64>,
    pub cap: f64,
    pub floor: f64,
    pub steps: usize,
    pub probes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub plots: bool,
    pub grid: GridConfig,
    pub physics: PhysicsConfig,
    pub analysis: AnalysisConfig,
    pub stepper: StepperSection,
    pub data: DataRecipe,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twin: Option<TwinConfig>,
    #[serde(default)]
    pub constants: CalibrationConstants,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationConfig>,
}

impl RunConfig {
    /// Parses and validates; every violated constraint is listed.
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::file(path, e))?;
        Self::parse(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        let problems = self.problems();
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems))
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Err(e) = self.grid_spec() {
            out.push(format!("grid: {e}"));
        }
        out.extend(self.stepper_config().problems().into_iter().map(|p| format!("stepper: {p}")));
        let a = &self.analysis;
        if !(a.probe_every >= 0.0 && a.probe_every.is_finite()) {
            out.push(format!("analysis: probe_every = {} must be finite and ≥ 0", a.probe_every));
        }
        if !a.s.is_finite() {
            out.push(format!("analysis: s = {} must be finite", a.s));
        }
        if let Err(e) = self.probe_schedule().validate() {
            out.push(format!("analysis: {e}"));
        }
        for p in &a.lp {
            if !(*p >= 1.0) {
                out.push(format!("analysis: L^p order {p} must be ≥ 1"));
            }
        }
        if let Some(t) = a.t_star {
            if !(t > 0.0 && t.is_finite()) {
                out.push(format!("analysis: t_star = {t} must be positive"));
            }
        }
        if let Some(g) = a.gamma {
            if !(g > 0.0 && g < 1.0) {
                out.push(format!("analysis: gamma = {g} must lie in (0, 1)"));
            }
        }
        for (name, v) in [("c_star_upper", a.c_star_upper), ("blowup_prefactor", a.blowup_prefactor)] {
            if let Some(v) = v {
                if !(v > 0.0 && v.is_finite()) {
                    out.push(format!("analysis: {name} = {v} must be positive"));
                }
            }
        }
        if a.t_star.is_some() || a.gamma.is_some() || a.c_star_upper.is_some() {
            if let Err(e) = check_subcritical_range(a.s, self.physics.alpha) {
                out.push(format!("analysis: {e}"));
            }
        }
        out.extend(self.data.problems("data"));
        out.extend(self.constants.problems().into_iter().map(|p| format!("constants: {p}")));
        if let Some(tw) = &self.twin {
            out.extend(tw.perturbation.problems("twin.perturbation"));
            if let Some(sched) = self.twin_schedule() {
                out.extend(sched.problems().into_iter().map(|p| format!("twin: {p}")));
            }
        }
        if let Some(c) = &self.calibration {
            let n = c.rescale.len() + c.amplitudes.len();
            if c.rescale.is_empty() == c.amplitudes.is_empty() {
                out.push("calibration: give exactly one of rescale or amplitudes".into());
            } else if n < 3 {
                out.push(format!("calibration: family has {n} members, need at least 3"));
            }
            if !(c.floor > 0.0 && c.floor < c.cap && c.cap.is_finite()) {
                out.push(format!("calibration: need 0 < floor < cap, got {} and {}", c.floor, c.cap));
            }
            if c.steps == 0 || c.probes == 0 {
                out.push("calibration: steps and probes must be positive".into());
            }
            if let Err(e) = check_subcritical_range(a.s, self.physics.alpha) {
                out.push(format!("calibration: {e}"));
            }
        }
        out
    }

    pub fn grid_spec(&self) -> sqg_core::Result<GridSpec> {
        GridSpec::with_dealias(self.grid.n, self.grid.box_length, self.grid.dealias)
    }

    pub fn stepper_config(&self) -> StepperConfig {
        let mut cfg = StepperConfig::new(self.physics.alpha, self.stepper.dt, self.stepper.t_end).with_mode(self.stepper.mode);
        cfg.checkpoint_every = self.stepper.checkpoint_every;
        cfg
    }

    pub fn norm_request(&self) -> NormRequest {
        let mut sobolev = vec![self.analysis.s];
        for s in &self.analysis.sobolev {
            if !sobolev.contains(s) {
                sobolev.push(*s);
            }
        }
        NormRequest {
            lp: self.analysis.lp.clone(),
            sobolev,
            besov: self.analysis.besov.clone(),
        }
    }

    pub fn probe_schedule(&self) -> ProbeSchedule {
        ProbeSchedule::every(self.analysis.probe_every)
            .with_request(self.norm_request())
            .with_blowup(BlowupPolicy {
                s: self.analysis.s,
                hs_multiple: self.analysis.hs_multiple,
                tail_fraction: self.analysis.tail_fraction,
                stop_on_flag: self.analysis.stop_on_flag,
            })
    }

    pub fn twin_schedule(&self) -> Option<TwinSchedule> {
        self.twin.as_ref().map(|tw| TwinSchedule {
            every: self.analysis.probe_every,
            thm4_j: tw.j,
            thm4_q: tw.q,
            thm5_p: tw.p_dynamic,
            thm5_q: tw.q_dynamic,
            cstar: self.constants.cstar.value,
        })
    }

    pub fn calibration_settings(&self) -> Option<CalibrationSettings> {
        self.calibration.as_ref().map(|c| CalibrationSettings {
            cap: c.cap,
            floor: c.floor,
            steps: c.steps,
            probes: c.probes,
            mode: self.stepper.mode,
        })
    }

    /// Run directory: the configured output, else `<root>/<stem>` with the
    /// root taken from `root`, then [`OUTPUT_ROOT_VAR`], then `runs`.
    pub fn output_dir(&self, config_path: Option<&Path>, root: Option<&Path>) -> PathBuf {
        if let Some(out) = &self.output {
            return out.clone();
        }
        let root = root.map(Path::to_path_buf).unwrap_or_else(|| {
            std::env::var_os(OUTPUT_ROOT_VAR).map_or_else(|| PathBuf::from("runs"), PathBuf::from)
        });
        let stem = config_path
            .and_then(|p| p.file_stem())
            .map_or_else(|| format!("run-{}", self.seed), |s| s.to_string_lossy().into_owned());
        root.join(stem)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const SAMPLE: &str = r#"
seed = 7
plots = true

[grid]
n = 32

[physics]
alpha = 0.25

[analysis]
s = 1.6
probe_every = 0.05
lp = [2.0, inf]
besov = [[0.5, 2.0]]
gamma = 0.5

[stepper]
t_end = 0.2
mode = "linear-heat"
dt = { kind = "fixed", dt = 0.01 }

[data]
kind = "band-limited-random"
min_freq = 1.0
max_freq = 6.0
normalize = { s = 1.6, value = 1.0 }

[twin]
j = 2
perturbation = { kind = "single-shell", j = 3, amplitude = 1e-3 }

[constants]
cb = { value = 2.0 }
cprop = { value = 0.5, source = "calibrated", run_id = "cal-1" }
"#;

    #[test]
    fn sample_parses_and_round_trips() {
        let cfg = RunConfig::parse(SAMPLE).unwrap();
        assert_eq!(cfg.grid.box_length, std::f64::consts::TAU);
        assert_eq!(cfg.twin.as_ref().unwrap().q_dynamic, f64::INFINITY);
        let text = cfg.to_toml();
        let again = RunConfig::parse(&text).unwrap();
        assert_eq!(again, cfg);
        assert_eq!(again.to_toml(), text);
    }

    #[test]
    fn every_violation_is_listed() {
        let bad = SAMPLE
            .replace("n = 32", "n = 30")
            .replace("alpha = 0.25", "alpha = 1.5")
            .replace("gamma = 0.5", "gamma = 1.5")
            .replace("cb = { value = 2.0 }", "cb = { value = -1.0 }");
        let Err(Error::Config(problems)) = RunConfig::parse(&bad) else {
            panic!("expected config error");
        };
        for needle in ["grid:", "alpha", "gamma", "cb"] {
            assert!(problems.iter().any(|p| p.contains(needle)), "{needle} missing from {problems:?}");
        }
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = SAMPLE.replace("plots = true", "plots = true\nplot = false");
        assert!(matches!(RunConfig::parse(&bad), Err(Error::Parse(_))));
    }
}
