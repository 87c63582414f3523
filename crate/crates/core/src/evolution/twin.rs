use serde::{Deserialize, Serialize};

use super::stepper::{Stepper, StepperConfig};
use super::trajectory::{Clock, Failure};
use crate::criteria::thm5_cutoff;
use crate::error::{Error, Result};
use crate::littlewood_paley::{band_lp_pair, FilterBank, Split};
use crate::spectral::{gradient, max_speed, GridSpec, SpectralField};

/// What a twin run records at each probe.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinSchedule {
    /// Probe interval; 0 probes after every step.
    pub every: f64,
    /// Fixed cutoff J of the high/low ratio.
    pub thm4_j: i32,
    /// q of the fixed-cutoff ratio; its p is 2q/(q−1).
    pub thm4_q: f64,
    /// p of the dynamic-cutoff ratio.
    pub thm5_p: f64,
    /// q of ||∇θ₁||_q driving the dynamic cutoff; may be infinite.
    pub thm5_q: f64,
    pub cstar: f64,
}

impl TwinSchedule {
    pub fn thm4_p(&self) -> f64 {
        2.0 * self.thm4_q / (self.thm4_q - 1.0)
    }

    pub fn problems(&self) -> Vec<String> {
        let mut problems = Vec::new();
        if !(self.every >= 0.0 && self.every.is_finite()) {
            problems.push(format!("probe interval {} must be finite and nonnegative", self.every));
        }
        if !(self.thm4_q > 1.0 && self.thm4_q.is_finite()) {
            problems.push(format!("thm4 q = {} must lie in (1, ∞)", self.thm4_q));
        }
        if !(self.thm5_p > 1.0 && self.thm5_p.is_finite()) {
            problems.push(format!("thm5 p = {} must lie in (1, ∞)", self.thm5_p));
        }
        if !(self.thm5_q > 1.0) {
            problems.push(format!("thm5 q = {} must lie in (1, ∞]", self.thm5_q));
        }
        if !(self.cstar > 0.0 && self.cstar.is_finite()) {
            problems.push(format!("c_* = {} must be positive", self.cstar));
        }
        problems
    }
}

/// One probe of a twin run; w = θ₁ − θ₂.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwinRow {
    pub time: f64,
    pub w_l2: f64,
    /// ||w_{<J}||_p and ||w_{≥J}||_p at the fixed J, p = 2q/(q−1).
    pub thm4_low: f64,
    pub thm4_high: f64,
    /// ||w||_p at the dynamic-cutoff p.
    pub w_lp: f64,
    /// ||w||_p^p.
    pub w_lp_pow: f64,
    /// ||∇θ₁||_q and ||∇θ₁||_∞.
    pub grad_q: f64,
    pub grad_inf: f64,
    /// J(t) from the dynamic cutoff rule.
    pub thm5_j: f64,
    /// ||w_{≤J(t)}||_p and ||w_{>J(t)}||_p.
    pub thm5_low: f64,
    pub thm5_high: f64,
}

impl TwinRow {
    /// Column names matching [`TwinRow::values`].
    pub const COLUMNS: [&'static str; 11] = [
        "time", "w_l2", "thm4_low", "thm4_high", "w_lp", "w_lp_pow", "grad_q", "grad_inf", "thm5_j",
        "thm5_low", "thm5_high",
    ];

    pub fn values(&self) -> [f64; 11] {
        [
            self.time,
            self.w_l2,
            self.thm4_low,
            self.thm4_high,
            self.w_lp,
            self.w_lp_pow,
            self.grad_q,
            self.grad_inf,
            self.thm5_j,
            self.thm5_low,
            self.thm5_high,
        ]
    }

    pub fn from_values(v: &[f64]) -> Result<Self> {
        if v.len() != 11 {
            return Err(Error::SizeMismatch {
                expected: 11,
                got: v.len(),
            });
        }
        Ok(Self {
            time: v[0],
            w_l2: v[1],
            thm4_low: v[2],
            thm4_high: v[3],
            w_lp: v[4],
            w_lp_pow: v[5],
            grad_q: v[6],
            grad_inf: v[7],
            thm5_j: v[8],
            thm5_low: v[9],
            thm5_high: v[10],
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Member {
    First,
    Second,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwinRecord {
    pub grid: GridSpec,
    pub config: StepperConfig,
    pub schedule: TwinSchedule,
    pub rows: Vec<TwinRow>,
    /// Set when one member produced a non-finite state.
    pub diverged: Option<(Member, Failure)>,
    pub steps: usize,
}

/// Probe quantities for the pair (θ₁, θ₂).
pub fn twin_row(
    bank: &FilterBank,
    first: &SpectralField,
    second: &SpectralField,
    time: f64,
    alpha: f64,
    schedule: &TwinSchedule,
) -> Result<TwinRow> {
    let w = first.checked_sub(second)?;
    let p4 = schedule.thm4_p();
    let p5 = schedule.thm5_p;
    let (thm4_low, thm4_high) = band_lp_pair(bank, &w, schedule.thm4_j as f64, p4, Split::Strict)?;
    let w_lp = w.lp_norm(p5)?;
    let grad = gradient(first)?;
    let grad_inf = grad.lp_norm(f64::INFINITY)?;
    let grad_q = if schedule.thm5_q.is_infinite() {
        grad_inf
    } else {
        grad.lp_norm(schedule.thm5_q)?
    };
    let thm5_j = thm5_cutoff(grad_q, schedule.thm5_q, alpha, schedule.cstar)?;
    let (thm5_low, thm5_high) = band_lp_pair(bank, &w, thm5_j, p5, Split::Inclusive)?;
    Ok(TwinRow {
        time,
        w_l2: w.l2_norm(),
        thm4_low,
        thm4_high,
        w_lp,
        w_lp_pow: w_lp.powf(p5),
        grad_q,
        grad_inf,
        thm5_j,
        thm5_low,
        thm5_high,
    })
}

/// Advances both members with one shared step sequence. Under a CFL policy
/// the step is set by the faster of the two.
pub fn twin_evolve(
    first0: &SpectralField,
    second0: &SpectralField,
    cfg: &StepperConfig,
    schedule: &TwinSchedule,
) -> Result<TwinRecord> {
    if first0.grid() != second0.grid() {
        return Err(Error::GridMismatch);
    }
    first0.check_finite()?;
    second0.check_finite()?;
    let problems = schedule.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    let grid = *first0.grid();
    let bank = FilterBank::new(grid);
    let mut s1 = Stepper::new(grid, cfg)?;
    let mut s2 = s1.clone();
    let (mut a, mut b) = (first0.clone(), second0.clone());
    let mut record = TwinRecord {
        grid,
        config: *cfg,
        schedule: *schedule,
        rows: vec![twin_row(&bank, &a, &b, 0.0, cfg.alpha, schedule)?],
        diverged: None,
        steps: 0,
    };
    let mut clock = Clock::new(schedule.every, cfg.t_end);
    let mut last_good = 0.0;
    while !clock.done() {
        let proposal = if cfg.dt.is_fixed() {
            cfg.dt.proposal(&grid, 0.0)
        } else {
            cfg.dt.proposal(&grid, max_speed(&a).max(max_speed(&b)))
        };
        let (dt, landing) = clock.clip(proposal);
        let (ra, rb) = rayon::join(|| s1.step(&a, dt), || s2.step(&b, dt));
        let failure = Failure {
            time: clock.t + dt,
            step: clock.step + 1,
            last_good_time: last_good,
        };
        match (ra, rb) {
            (Ok(na), Ok(nb)) => {
                a = na;
                b = nb;
            }
            (Err(Error::NonFinite(_)), _) => {
                record.diverged = Some((Member::First, failure));
                break;
            }
            (_, Err(Error::NonFinite(_))) => {
                record.diverged = Some((Member::Second, failure));
                break;
            }
            (Err(e), _) | (_, Err(e)) => return Err(e),
        }
        if clock.advance(dt, landing) {
            last_good = clock.t;
            record.rows.push(twin_row(&bank, &a, &b, clock.t, cfg.alpha, schedule)?);
        }
    }
    record.steps = clock.step;
    Ok(record)
}

#[cfg(test)]
mod tests {
    use super::super::stepper::DtPolicy;
    use super::*;
    use crate::spectral::random::{random_band_field, stream_rng, BandSpec};

    fn schedule() -> TwinSchedule {
        TwinSchedule {
            every: 0.05,
            thm4_j: 2,
            thm4_q: 2.0,
            thm5_p: 4.0,
            thm5_q: 2.0,
            cstar: 1.0,
        }
    }

    #[test]
    fn identical_twins_have_zero_error() {
        let g = GridSpec::periodic(32).unwrap();
        let theta = random_band_field(g, &BandSpec::new(1.0, 8.0, -1.0), &mut stream_rng(4, 0));
        let cfg = StepperConfig::new(0.25, DtPolicy::Cfl { safety: 0.5, dt_max: 0.02 }, 0.2);
        let rec = twin_evolve(&theta, &theta, &cfg, &schedule()).unwrap();
        assert_eq!(rec.rows.len(), 5);
        for row in &rec.rows {
            assert_eq!(row.w_l2, 0.0);
            assert_eq!(row.thm4_low + row.thm4_high + row.thm5_low + row.thm5_high, 0.0);
        }
    }

    #[test]
    fn high_shell_perturbation_has_no_low_part() {
        let g = GridSpec::periodic(64).unwrap();
        let theta = random_band_field(g, &BandSpec::new(1.0, 4.0, -1.0), &mut stream_rng(4, 0));
        let bump = random_band_field(g, &BandSpec::new(16.0, 20.0, 0.0), &mut stream_rng(4, 1)).scaled(1e-3);
        let cfg = StepperConfig::new(0.25, DtPolicy::Fixed { dt: 0.01 }, 0.0);
        let rec = twin_evolve(&(&theta + &bump), &theta, &cfg, &schedule()).unwrap();
        let row = rec.rows[0];
        assert!(row.thm4_low <= 1e-14 * row.thm4_high);
        assert!(row.thm4_high > 0.0);
    }

    #[test]
    fn row_values_round_trip() {
        let row = TwinRow::from_values(&[0.1, 1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, -1.5, 8.0, 9.0]).unwrap();
        assert_eq!(TwinRow::from_values(&row.values()).unwrap(), row);
        assert!(TwinRow::from_values(&[1.0]).is_err());
    }
}
