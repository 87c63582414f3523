use serde::{Deserialize, Serialize};

use super::stepper::Mode;
use crate::error::{Error, Result};
use crate::littlewood_paley::{sobolev_norm, FilterBank};
use crate::spectral::{
    advection_unchecked, gradient_unchecked, riesz_velocity, transport_product, SpectralField,
};

/// Per-shell energy identity
/// d/dt||θ_j||₂² + 2||Λ^αθ_j||₂² − 2⟨[u,Δ_j]∇θ, θ_j⟩ = 0 evaluated on data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyAudit {
    pub j: i32,
    pub alpha: f64,
    /// Interior snapshot times where the centred difference is formed.
    pub times: Vec<f64>,
    pub residuals: Vec<f64>,
    /// max |r_j| over max of the three term magnitudes, 0 for a silent shell.
    pub normalized_max: f64,
    /// Range of ||Λ^αθ_j||₂² / (2^{2αj}||θ_j||₂²) over the snapshots.
    pub dissipation_ratio: (f64, f64),
}

/// The three terms of the identity at one snapshot: (||θ_j||², 2||Λ^αθ_j||²,
/// 2⟨[u,Δ_j]∇θ, θ_j⟩).
fn shell_terms(bank: &FilterBank, theta: &SpectralField, j: i32, alpha: f64, mode: Mode) -> Result<(f64, f64, f64)> {
    let theta_j = bank.project_shell(theta, j).field;
    let energy = theta_j.l2_norm().powi(2);
    let dissipation = match mode {
        Mode::Transport => 0.0,
        _ => 2.0 * sobolev_norm(&theta_j, alpha)?.powi(2),
    };
    if mode == Mode::LinearHeat {
        return Ok((energy, dissipation, 0.0));
    }
    // discrete equation: ∂ₜθ_j = −Λ^{2α}θ_j − Δ_j P(u·∇θ)
    let u = riesz_velocity(&theta.dealiased())?;
    let transported = transport_product(&u, &gradient_unchecked(&theta_j));
    let projected = bank.project_shell(&advection_unchecked(theta), j).field;
    let commutator = &transported - &projected;
    Ok((energy, dissipation, 2.0 * commutator.inner(&theta_j)))
}

/// Audits the shell-j energy identity on snapshots (time, θ) with
/// non-uniform three-point time differences. Terms absent from `mode` are
/// dropped from the identity.
pub fn per_mode_energy_audit(
    bank: &FilterBank,
    snapshots: &[(f64, SpectralField)],
    j: i32,
    alpha: f64,
    mode: Mode,
) -> Result<EnergyAudit> {
    if snapshots.len() < 3 {
        return Err(Error::InvalidParameter(format!(
            "energy audit needs at least 3 snapshots, got {}",
            snapshots.len()
        )));
    }
    if !bank.contains(j) {
        return Err(Error::InvalidParameter(format!("shell {j} outside the filter bank")));
    }
    if snapshots.windows(2).any(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidParameter("snapshot times must increase".into()));
    }
    let terms = snapshots
        .iter()
        .map(|(_, f)| shell_terms(bank, f, j, alpha, mode))
        .collect::<Result<Vec<_>>>()?;
    let mut times = Vec::new();
    let mut residuals = Vec::new();
    let mut scale: f64 = 0.0;
    for k in 1..snapshots.len() - 1 {
        let (t0, t1, t2) = (snapshots[k - 1].0, snapshots[k].0, snapshots[k + 1].0);
        let (h0, h1) = (t1 - t0, t2 - t1);
        let (e0, e1, e2) = (terms[k - 1].0, terms[k].0, terms[k + 1].0);
        let derivative = -h1 / (h0 * (h0 + h1)) * e0 + (h1 - h0) / (h0 * h1) * e1 + h0 / (h1 * (h0 + h1)) * e2;
        let (_, dis, comm) = terms[k];
        residuals.push(derivative + dis - comm);
        times.push(t1);
        scale = scale.max(derivative.abs()).max(dis.abs()).max(comm.abs());
    }
    let max_res = residuals.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let weight = 2f64.powf(2.0 * alpha * j as f64);
    let (lo, hi) = terms
        .iter()
        .filter(|t| t.0 > 0.0)
        .map(|t| 0.5 * t.1 / (weight * t.0))
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    Ok(EnergyAudit {
        j,
        alpha,
        times,
        residuals,
        normalized_max: if scale > 0.0 { max_res / scale } else { 0.0 },
        dissipation_ratio: if hi > 0.0 { (lo, hi) } else { (0.0, 0.0) },
    })
}

#[cfg(test)]
mod tests {
    use super::super::stepper::{DtPolicy, StepperConfig};
    use super::super::trajectory::{evolve, ProbeSchedule};
    use super::*;
    use crate::spectral::random::{random_band_field, stream_rng, BandSpec};
    use crate::spectral::GridSpec;

    fn audit(mode: Mode, every: f64) -> EnergyAudit {
        let g = GridSpec::periodic(64).unwrap();
        let theta = random_band_field(g, &BandSpec::new(1.0, 10.0, -2.0), &mut stream_rng(8, 0)).scaled(2.0);
        let cfg = StepperConfig::new(0.4, DtPolicy::Fixed { dt: every / 4.0 }, 0.3).with_mode(mode);
        let rec = evolve(&theta, &cfg, &ProbeSchedule::every(every).keeping_fields()).unwrap();
        per_mode_energy_audit(&FilterBank::new(g), &rec.fields, 2, 0.4, mode).unwrap()
    }

    #[test]
    fn linear_heat_residual_is_differencing_error() {
        let a = audit(Mode::LinearHeat, 0.02);
        let b = audit(Mode::LinearHeat, 0.01);
        assert!(a.normalized_max < 1e-2);
        assert!(a.normalized_max / b.normalized_max > 3.5);
    }

    #[test]
    fn nonlinear_residual_converges() {
        let a = audit(Mode::Nonlinear, 0.02);
        let b = audit(Mode::Nonlinear, 0.01);
        assert!(b.normalized_max < 1e-2, "{}", b.normalized_max);
        assert!((a.normalized_max / b.normalized_max).log2() > 1.8);
    }

    #[test]
    fn zero_field_and_short_input() {
        let g = GridSpec::periodic(16).unwrap();
        let bank = FilterBank::new(g);
        let z = SpectralField::zeros(g);
        let snaps: Vec<_> = (0..3).map(|k| (k as f64 * 0.1, z.clone())).collect();
        let a = per_mode_energy_audit(&bank, &snaps, 0, 0.3, Mode::Nonlinear).unwrap();
        assert!(a.residuals.iter().all(|r| *r == 0.0));
        assert_eq!(a.normalized_max, 0.0);
        assert!(per_mode_energy_audit(&bank, &snaps[..2], 0, 0.3, Mode::Nonlinear).is_err());
    }
}
