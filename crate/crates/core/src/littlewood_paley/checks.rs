//! Numerical checkers for Bernstein, log-convexity and commutator estimates.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::filter::FilterBank;
use super::norms::sobolev_norm;
use crate::error::{Error, Result};
use crate::spectral::random::{random_band_field, stream_rng, BandSpec};
use crate::spectral::{gradient, GridSpec, SpectralField};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BernsteinReport {
    pub j: i32,
    pub p: f64,
    pub trials: usize,
    /// Trials whose shell projection was empty.
    pub skipped: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// Ratios outside [1/2, 2].
    pub violations: usize,
}

/// ||∇Δ_jθ||_p / (2^j ||Δ_jθ||_p) for one field, `None` when Δ_jθ = 0.
pub fn bernstein_ratio(bank: &FilterBank, theta: &SpectralField, j: i32, p: f64) -> Result<Option<f64>> {
    let shell = bank.project_shell(theta, j).field;
    if shell.is_zero() {
        return Ok(None);
    }
    let (num, den) = if p == 2.0 {
        (gradient(&shell)?.l2_norm(), shell.l2_norm())
    } else {
        (gradient(&shell)?.lp_norm(p)?, shell.lp_norm(p)?)
    };
    if den == 0.0 {
        return Ok(None);
    }
    Ok(Some(num / (2f64.powi(j) * den)))
}

/// Draws `trials` random fields on the annulus of shell j and measures the
/// Bernstein ratio of each.
pub fn bernstein_check(bank: &FilterBank, j: i32, p: f64, trials: usize, seed: u64) -> Result<BernsteinReport> {
    if !bank.contains(j) {
        return Err(Error::InvalidParameter(format!(
            "shell {j} outside [{}, {}]",
            bank.j_min(),
            bank.j_max()
        )));
    }
    let lo = 2f64.powi(j - 1);
    let hi = 2f64.powi(j + 1);
    let mut report = BernsteinReport {
        j,
        p,
        trials,
        skipped: 0,
        min_ratio: f64::INFINITY,
        max_ratio: 0.0,
        violations: 0,
    };
    for trial in 0..trials {
        let spec = BandSpec::new(lo, hi, 0.0).gaussian();
        let theta = random_band_field(*bank.grid(), &spec, &mut stream_rng(seed, trial as u64));
        match bernstein_ratio(bank, &theta, j, p)? {
            None => report.skipped += 1,
            Some(r) => {
                report.min_ratio = report.min_ratio.min(r);
                report.max_ratio = report.max_ratio.max(r);
                if !(0.5..=2.0).contains(&r) {
                    report.violations += 1;
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InterpolationReport {
    pub p0: f64,
    pub p1: f64,
    pub theta: f64,
    pub p_theta: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// rhs − lhs.
    pub slack: f64,
    pub holds: bool,
}

fn quadrature_norm(samples: &[f64], grid: &GridSpec, p: f64) -> f64 {
    let max = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if max == 0.0 {
        return 0.0;
    }
    let sum: f64 = samples.iter().map(|v| (v.abs() / max).powf(p)).sum();
    max * (sum * grid.cell_area()).powf(1.0 / p)
}

/// ||f||_{p_θ} ≤ ||f||_{p0}^{1−θ} ||f||_{p1}^θ with 1/p_θ = (1−θ)/p0 + θ/p1.
pub fn interpolation_check(f: &SpectralField, p0: f64, p1: f64, theta: f64) -> Result<InterpolationReport> {
    if !(p0 > 0.0 && p0 < p1 && p1.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "need 0 < p0 < p1 < ∞, got p0 = {p0}, p1 = {p1}"
        )));
    }
    if !(0.0..=1.0).contains(&theta) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside [0, 1]")));
    }
    f.check_finite()?;
    let samples = f.to_physical();
    let g = f.grid();
    let p_theta = 1.0 / ((1.0 - theta) / p0 + theta / p1);
    let lhs = quadrature_norm(&samples, g, p_theta);
    let rhs = quadrature_norm(&samples, g, p0).powf(1.0 - theta) * quadrature_norm(&samples, g, p1).powf(theta);
    Ok(InterpolationReport {
        p0,
        p1,
        theta,
        p_theta,
        lhs,
        rhs,
        slack: rhs - lhs,
        holds: lhs <= rhs * (1.0 + 1e-12),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorShell {
    pub j: i32,
    /// Geometric mean over trials of ||[f,Δ_j]g||₂.
    pub norm: f64,
    /// Geometric mean of ||[f,Δ_j]g||₂ 2^{(s+t−1)j} / (||f||_{Ḣ^s}||g||_{Ḣ^t}).
    pub normalized: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommutatorReport {
    pub s: f64,
    pub t: f64,
    pub trials: usize,
    pub predicted_exponent: f64,
    pub fitted_exponent: f64,
    pub shells: Vec<CommutatorShell>,
    /// ℓ² norm over the fitted shells of the normalized values.
    pub normalized_l2: f64,
    pub within_tolerance: bool,
}

/// Tolerance on the fitted decay exponent.
pub const COMMUTATOR_TOLERANCE: f64 = 0.3;

/// ||[f,Δ_j]g||₂ = ||fΔ_jg − Δ_j(fg)||₂ for j in `shells`.
///
/// Products are formed on a twice-refined grid, where they are exact for
/// dealiased inputs.
pub fn commutator_norms(f: &SpectralField, g: &SpectralField, shells: &[i32]) -> Result<Vec<f64>> {
    if f.grid() != g.grid() {
        return Err(Error::GridMismatch);
    }
    f.check_finite()?;
    g.check_finite()?;
    let fine = f.grid().n() * 2;
    let fp = f.zero_padded(fine)?;
    let gp = g.zero_padded(fine)?;
    let fine_grid = *fp.grid();
    let bank = FilterBank::new(fine_grid);
    let (f_phys, g_phys) = SpectralField::to_physical_pair(&fp, &gp);
    let product: Vec<f64> = f_phys.iter().zip(&g_phys).map(|(a, b)| a * b).collect();
    let fg = SpectralField::from_physical(fine_grid, &product)?;
    shells
        .iter()
        .map(|&j| {
            let (dg, dfg) = SpectralField::to_physical_pair(
                &bank.project_shell(&gp, j).field,
                &bank.project_shell(&fg, j).field,
            );
            let comm: Vec<f64> = (0..fine_grid.len()).map(|i| f_phys[i] * dg[i] - dfg[i]).collect();
            Ok(SpectralField::from_physical(fine_grid, &comm)?.l2_norm())
        })
        .collect()
}

/// Random field whose modes all peak in phase at `centre`, with magnitudes
/// |ξ|^{(slope−2)/2} scaled by independent uniform factors in [1/2, 3/2].
///
/// Aligned phases concentrate the low-frequency gradient near the centre,
/// which is the configuration the commutator bound has to cover.
pub fn coherent_band_field<R: Rng>(grid: GridSpec, spec: &BandSpec, centre: (f64, f64), rng: &mut R) -> SpectralField {
    let mut coeffs = vec![Complex64::default(); grid.len()];
    for (idx, a, b) in grid.lattice() {
        let partner = grid.conjugate_flat(a, b);
        if partner <= idx || grid.is_nyquist(a, b) {
            continue;
        }
        let r = grid.xi_norm(a, b);
        if r < spec.min_freq || r > spec.max_freq || (spec.dealiased && !grid.is_retained(a, b)) {
            continue;
        }
        let (x1, x2) = grid.xi(a, b);
        let magnitude = r.powf(0.5 * (spec.slope - 2.0)) * rng.random_range(0.5..1.5);
        let c = Complex64::from_polar(magnitude, -(x1 * centre.0 + x2 * centre.1));
        coeffs[idx] = c;
        coeffs[partner] = c.conj();
    }
    SpectralField::from_coeffs(grid, coeffs).expect("Hermitian by construction")
}

/// Least-squares slope of y against x.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Measures the decay of ||[f,Δ_j]g||₂ in j for coherent random f, g at the
/// critical spectral slopes of Ḣ^s and Ḣ^t and fits the exponent of 2^{−κj}.
pub fn commutator_check(
    grid: GridSpec,
    s: f64,
    t: f64,
    shells: &[i32],
    trials: usize,
    seed: u64,
) -> Result<CommutatorReport> {
    if !((1.0..2.0).contains(&s) && t < 1.0 && s + t > 1.0) {
        return Err(Error::Hypothesis(format!(
            "commutator estimate needs 1 ≤ s < 2, t < 1, s + t > 1; got s = {s}, t = {t}"
        )));
    }
    if shells.len() < 2 || trials == 0 {
        return Err(Error::InvalidParameter(
            "need at least two shells and one trial".into(),
        ));
    }
    let predicted = s + t - 1.0;
    let top = grid.dealias_cutoff() * grid.fundamental();
    let bottom = grid.fundamental();
    let mut log_norm = vec![0.0; shells.len()];
    let mut log_normalized = vec![0.0; shells.len()];
    for trial in 0..trials {
        let mut rng = stream_rng(seed, trial as u64);
        let centre = (
            rng.random::<f64>() * grid.box_length(),
            rng.random::<f64>() * grid.box_length(),
        );
        let f = coherent_band_field(grid, &BandSpec::new(bottom, top, -2.0 * s), centre, &mut rng);
        let g = coherent_band_field(grid, &BandSpec::new(bottom, top, -2.0 * t), centre, &mut rng);
        let scale = sobolev_norm(&f, s)? * sobolev_norm(&g, t)?;
        for (k, (&j, c)) in shells.iter().zip(commutator_norms(&f, &g, shells)?).enumerate() {
            log_norm[k] += c.log2();
            log_normalized[k] += (c * 2f64.powf(predicted * j as f64) / scale).log2();
        }
    }
    let m = trials as f64;
    let shells_out: Vec<CommutatorShell> = shells
        .iter()
        .enumerate()
        .map(|(k, &j)| CommutatorShell {
            j,
            norm: (log_norm[k] / m).exp2(),
            normalized: (log_normalized[k] / m).exp2(),
        })
        .collect();
    let xs: Vec<f64> = shells.iter().map(|&j| j as f64).collect();
    let ys: Vec<f64> = log_norm.iter().map(|v| v / m).collect();
    let fitted = -fit_slope(&xs, &ys);
    let normalized_l2 = shells_out.iter().map(|c| c.normalized.powi(2)).sum::<f64>().sqrt();
    Ok(CommutatorReport {
        s,
        t,
        trials,
        predicted_exponent: predicted,
        fitted_exponent: fitted,
        shells: shells_out,
        normalized_l2,
        within_tolerance: (fitted - predicted).abs() <= COMMUTATOR_TOLERANCE,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_mode_bernstein_ratio_is_one() {
        let g = GridSpec::periodic(64).unwrap();
        let bank = FilterBank::new(g);
        let mut f = SpectralField::zeros(g);
        f.set_mode(4, 0, Complex64::new(0.5, 0.0));
        let r = bernstein_ratio(&bank, &f, 2, 2.0).unwrap().unwrap();
        assert!((r - 1.0).abs() < 1e-14);
        assert_eq!(bernstein_ratio(&bank, &SpectralField::zeros(g), 2, 2.0).unwrap(), None);
    }

    #[test]
    fn bernstein_bounds_hold() {
        let g = GridSpec::periodic(64).unwrap();
        let bank = FilterBank::new(g);
        for j in bank.j_range() {
            let r = bernstein_check(&bank, j, 2.0, 10, 11).unwrap();
            assert_eq!(r.violations, 0, "shell {j}: {r:?}");
        }
    }

    #[test]
    fn interpolation_endpoints_and_constants() {
        let g = GridSpec::periodic(32).unwrap();
        let mut f = SpectralField::zeros(g);
        f.set_mode(2, 1, Complex64::new(0.3, 0.2));
        f.set_mode(0, 0, Complex64::new(0.4, 0.0));
        for th in [0.0, 1.0] {
            let r = interpolation_check(&f, 2.0, 6.0, th).unwrap();
            assert!((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs);
        }
        let mut c = SpectralField::zeros(g);
        c.set_mode(0, 0, Complex64::new(2.0, 0.0));
        let r = interpolation_check(&c, 1.5, 5.0, 0.3).unwrap();
        assert!((r.lhs - r.rhs).abs() <= 1e-12 * r.rhs && r.holds);
        assert!(interpolation_check(&f, 3.0, 2.0, 0.5).is_err());
    }

    #[test]
    fn commutator_trivial_cases() {
        let g = GridSpec::periodic(32).unwrap();
        let mut constant = SpectralField::zeros(g);
        constant.set_mode(0, 0, Complex64::new(1.5, 0.0));
        let gfield = random_band_field(g, &BandSpec::new(1.0, 10.0, 0.0), &mut stream_rng(1, 0));
        for c in commutator_norms(&constant, &gfield, &[0, 1, 2, 3]).unwrap() {
            assert!(c < 1e-12);
        }
        // f and g both supported on |ξ| ≤ 2; shell 4 sees neither g nor fg
        let low_f = random_band_field(g, &BandSpec::new(1.0, 2.0, 0.0), &mut stream_rng(2, 0));
        let low_g = random_band_field(g, &BandSpec::new(1.0, 2.0, 0.0), &mut stream_rng(2, 1));
        assert!(commutator_norms(&low_f, &low_g, &[4]).unwrap()[0] < 1e-13);
        assert!(commutator_check(g, 0.5, 0.2, &[1, 2], 1, 0).is_err());
    }
}
