//! Empirical estimate of the existence-time constant C₀.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::formulas::{check_subcritical_range, time_exponent};
use crate::error::{Error, Result};
use crate::evolution::{evolve, BlowupPolicy, BlowupReason, DtPolicy, Mode, ProbeSchedule, StepperConfig};
use crate::littlewood_paley::sobolev_norm;
use crate::spectral::SpectralField;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationSettings {
    /// Largest C₀ tried; members run to cap·h^{−2α/(s−2+2α)}.
    pub cap: f64,
    /// Below this C₀ the calibration is a failure.
    pub floor: f64,
    /// Minimum steps per member horizon; CFL may add more.
    pub steps: usize,
    /// Probes per member horizon.
    pub probes: usize,
    pub mode: Mode,
}

impl Default for CalibrationSettings {
    fn default() -> Self {
        Self {
            cap: 1.0,
            floor: 1e-6,
            steps: 400,
            probes: 200,
            mode: Mode::Nonlinear,
        }
    }
}

/// One family member: its Ḣ^s size and the first time ||θ(t)|| reached
/// 2||θ₀||, if it did within its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MemberTiming {
    pub h0: f64,
    pub horizon: f64,
    pub doubling_time: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C0Calibration {
    pub c0: f64,
    pub s: f64,
    pub alpha: f64,
    pub members: Vec<MemberTiming>,
    /// −2α/(s−2+2α).
    pub predicted_slope: f64,
    /// Slope of log(doubling time) against log h0, when at least two members doubled.
    pub fitted_slope: Option<f64>,
}

impl C0Calibration {
    /// |fitted/predicted − 1|.
    pub fn slope_error(&self) -> Option<f64> {
        self.fitted_slope.map(|f| (f / self.predicted_slope - 1.0).abs())
    }
}

/// CFL factor of member runs; dx/|u| scales like the time of the rescaled
/// family, so the steps stay self-similar.
const CFL_SAFETY: f64 = 0.5;

fn member_timing(theta0: &SpectralField, s: f64, alpha: f64, settings: &CalibrationSettings) -> Result<MemberTiming> {
    let h0 = sobolev_norm(theta0, s)?;
    if h0 == 0.0 {
        return Err(Error::InvalidParameter("family member with zero Ḣ^s norm".into()));
    }
    let horizon = settings.cap * h0.powf(-time_exponent(s, alpha));
    let cfg = StepperConfig::new(
        alpha,
        DtPolicy::Cfl {
            safety: CFL_SAFETY,
            dt_max: horizon / settings.steps as f64,
        },
        horizon,
    )
    .with_mode(settings.mode);
    let schedule = ProbeSchedule::every(horizon / settings.probes as f64).with_blowup(BlowupPolicy {
        s,
        hs_multiple: 2.0,
        tail_fraction: 1.0,
        stop_on_flag: true,
    });
    let rec = evolve(theta0, &cfg, &schedule)?;
    let doubling_time = match rec.blowup {
        None => None,
        Some(flag) if flag.reason == BlowupReason::IntegratorFailure => {
            return Err(Error::Calibration(format!("integrator failure at t = {}", flag.time)))
        }
        Some(_) => {
            let target = 2.0 * h0;
            let k = rec
                .entries
                .iter()
                .position(|e| e.hs > target)
                .expect("flagged run has an exceeding probe");
            if k == 0 {
                Some(0.0)
            } else {
                let (a, b) = (&rec.entries[k - 1], &rec.entries[k]);
                Some(a.time + (target - a.hs) / (b.hs - a.hs) * (b.time - a.time))
            }
        }
    };
    Ok(MemberTiming {
        h0,
        horizon,
        doubling_time,
    })
}

/// Largest C₀ ≤ cap such that every member keeps ||θ(t)||_{Ḣ^s} ≤ 2||θ₀||_{Ḣ^s}
/// on [0, C₀||θ₀||^{−2α/(s−2+2α)}].
pub fn calibrate_c0(
    family: &[SpectralField],
    s: f64,
    alpha: f64,
    settings: &CalibrationSettings,
) -> Result<C0Calibration> {
    check_subcritical_range(s, alpha)?;
    if !(settings.cap > 0.0 && settings.cap.is_finite() && settings.floor > 0.0 && settings.floor < settings.cap) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < floor < cap, got floor {} cap {}",
            settings.floor, settings.cap
        )));
    }
    if settings.steps == 0 || settings.probes == 0 {
        return Err(Error::InvalidParameter("steps and probes must be positive".into()));
    }
    if family.is_empty() {
        return Err(Error::InvalidParameter("empty calibration family".into()));
    }
    let members = family
        .par_iter()
        .map(|f| member_timing(f, s, alpha, settings))
        .collect::<Result<Vec<_>>>()?;
    let mut sizes: Vec<f64> = members.iter().map(|m| m.h0).collect();
    sizes.sort_by(f64::total_cmp);
    sizes.dedup_by(|a, b| (*a - *b).abs() <= 1e-9 * b.abs());
    if sizes.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "family spans {} distinct amplitude scales, need at least 3",
            sizes.len()
        )));
    }
    let e = time_exponent(s, alpha);
    let c0 = members
        .iter()
        .filter_map(|m| m.doubling_time.map(|t| t * m.h0.powf(e)))
        .fold(settings.cap, f64::min);
    if c0 < settings.floor {
        return Err(Error::Calibration(format!(
            "a member doubled its Ḣ^s norm before C₀ = {} (found {c0:e})",
            settings.floor
        )));
    }
    let doubled: Vec<(f64, f64)> = members
        .iter()
        .filter_map(|m| m.doubling_time.filter(|t| *t > 0.0).map(|t| (m.h0.ln(), t.ln())))
        .collect();
    let fitted_slope = (doubled.len() >= 2).then(|| {
        let (x, y): (Vec<f64>, Vec<f64>) = doubled.into_iter().unzip();
        crate::littlewood_paley::fit_slope(&x, &y)
    });
    Ok(C0Calibration {
        c0,
        s,
        alpha,
        members,
        predicted_slope: -e,
        fitted_slope,
    })
}

/// λ = 2^{−2α}: the smallest ||Λ^αθ_j||₂²/(2^{2αj}||θ_j||₂²) allowed by a
/// shell supported on 2^{j−1} ≤ |ξ| ≤ 2^{j+1}.
pub fn lambda_bern_default(alpha: f64) -> f64 {
    2f64.powf(-2.0 * alpha)
}

/// Cprop = γ ln(4/γ)/(2λ): the linear decay over t_check brings the shells
/// at and above J below γ/4 of their initial size.
pub fn cprop_default(gamma: f64, lambda: f64) -> f64 {
    gamma * (4.0 / gamma).ln() / (2.0 * lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::random::{random_band_field, stream_rng, BandSpec};
    use crate::spectral::GridSpec;

    fn base() -> SpectralField {
        let g = GridSpec::periodic(32).unwrap();
        random_band_field(g, &BandSpec::new(1.0, 4.0, -2.0), &mut stream_rng(3, 0))
    }

    #[test]
    fn linear_heat_returns_cap() {
        let f = base();
        let family: Vec<_> = [1.0, 2.0, 4.0].iter().map(|a| f.scaled(*a)).collect();
        let settings = CalibrationSettings {
            mode: Mode::LinearHeat,
            steps: 40,
            probes: 20,
            ..Default::default()
        };
        let c = calibrate_c0(&family, 1.6, 0.25, &settings).unwrap();
        assert_eq!(c.c0, settings.cap);
        assert!(c.fitted_slope.is_none());
    }

    #[test]
    fn rejects_empty_and_narrow_families() {
        let s = CalibrationSettings::default();
        assert!(calibrate_c0(&[], 1.6, 0.25, &s).is_err());
        let f = base();
        assert!(calibrate_c0(&[f.clone(), f.scaled(2.0)], 1.6, 0.25, &s).is_err());
    }

    #[test]
    fn cprop_default_matches_hand_value() {
        let c = cprop_default(0.5, lambda_bern_default(0.25));
        assert!((c - 0.5 * 8f64.ln() / (2.0 * 2f64.powf(-0.5))).abs() < 1e-15);
    }
}
