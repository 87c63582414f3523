use serde::{Deserialize, Serialize};

use super::filter::{Band, FilterBank};
use crate::error::{Error, Result};
use crate::spectral::SpectralField;

/// Parts below this fraction of the low+high total count as vanished.
pub const NEGLIGIBLE: f64 = 1e-14;

fn check_p(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        Err(Error::InvalidParameter(format!(
            "integrability exponent p = {p} must be at least 1"
        )))
    } else {
        Ok(())
    }
}

fn check_s(theta: &SpectralField, s: f64) -> Result<()> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("smoothness s = {s}")));
    }
    theta.check_finite()?;
    if s < 0.0 && theta.coeffs()[0].norm() > 0.0 {
        return Err(Error::Domain(format!(
            "Ḣ^{s} norm of a field with nonzero mean is infinite"
        )));
    }
    Ok(())
}

/// Ḣ^s norm of m·θ for a real multiplier m (all ones when `None`).
fn weighted_sobolev(theta: &SpectralField, s: f64, multiplier: Option<&[f64]>) -> f64 {
    let g = theta.grid();
    let mut sum = 0.0;
    for (idx, a, b) in g.lattice() {
        let c = theta.coeffs()[idx];
        let m = multiplier.map_or(1.0, |m| m[idx]);
        if m == 0.0 || (c.re == 0.0 && c.im == 0.0) {
            continue;
        }
        let weight = if idx == 0 {
            if s == 0.0 {
                1.0
            } else {
                0.0
            }
        } else {
            g.xi_norm(a, b).powf(2.0 * s)
        };
        sum += weight * m * m * c.norm_sqr();
    }
    g.box_length() * sum.sqrt()
}

/// ||θ||_{Ḣ^s} = (L² Σ |ξ|^{2s} |θ̂(ξ)|²)^{1/2}; at s = 0 the mean is
/// included so the value equals the L² norm.
pub fn sobolev_norm(theta: &SpectralField, s: f64) -> Result<f64> {
    check_s(theta, s)?;
    Ok(weighted_sobolev(theta, s, None))
}

/// L^p norm of m·θ: Parseval for p = 2, grid quadrature otherwise.
fn band_lp(theta: &SpectralField, multiplier: &[f64], p: f64) -> Result<f64> {
    if p == 2.0 {
        Ok(weighted_sobolev(theta, 0.0, Some(multiplier)))
    } else {
        theta.apply_multiplier(multiplier).lp_norm(p)
    }
}

/// ||Δ_j θ||_{L^p} over one filter bank's shells.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShellSpectrum {
    pub p: f64,
    pub j_min: i32,
    pub values: Vec<f64>,
}

impl ShellSpectrum {
    pub fn j_max(&self) -> i32 {
        self.j_min + self.values.len() as i32 - 1
    }

    /// e_j, zero outside the resolvable range.
    pub fn get(&self, j: i32) -> f64 {
        if j < self.j_min || j > self.j_max() {
            0.0
        } else {
            self.values[(j - self.j_min) as usize]
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, &v)| (self.j_min + i as i32, v))
    }

    /// (Σ_j (2^{js} e_j)²)^{1/2}.
    pub fn weighted_l2(&self, s: f64) -> f64 {
        self.iter()
            .map(|(j, e)| (2f64.powf(j as f64 * s) * e).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// sup_j 2^{js} e_j.
    pub fn weighted_sup(&self, s: f64) -> f64 {
        self.iter()
            .map(|(j, e)| 2f64.powf(j as f64 * s) * e)
            .fold(0.0, f64::max)
    }
}

pub fn shell_spectrum(bank: &FilterBank, theta: &SpectralField, p: f64) -> Result<ShellSpectrum> {
    check_p(p)?;
    theta.check_finite()?;
    let values = bank
        .j_range()
        .map(|j| band_lp(theta, bank.phi(j).expect("in range"), p))
        .collect::<Result<Vec<_>>>()?;
    Ok(ShellSpectrum {
        p,
        j_min: bank.j_min(),
        values,
    })
}

/// ||θ||_{Ḃ^s_{p,∞}} = sup_j 2^{js} ||Δ_j θ||_{L^p} over resolvable shells.
pub fn besov_norm(bank: &FilterBank, theta: &SpectralField, s: f64, p: f64) -> Result<f64> {
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("smoothness s = {s}")));
    }
    Ok(shell_spectrum(bank, theta, p)?.weighted_sup(s))
}

fn split_ratio(num: f64, den: f64) -> Result<f64> {
    let total = num + den;
    if total == 0.0 {
        return Err(Error::UndefinedRatio);
    }
    if num <= NEGLIGIBLE * total {
        Ok(0.0)
    } else if den <= NEGLIGIBLE * total {
        Ok(f64::INFINITY)
    } else {
        Ok(num / den)
    }
}

/// ||Δ_{<J}θ||_{Ḣ^s} / ||Δ_{≥J}θ||_{Ḣ^s}; ∞ when the high part vanishes,
/// [`Error::UndefinedRatio`] when both do.
pub fn sparseness_ratio(bank: &FilterBank, theta: &SpectralField, cutoff: f64, s: f64) -> Result<f64> {
    check_s(theta, s)?;
    let low = weighted_sobolev(theta, s, Some(&bank.band_multiplier(Band::Below, cutoff)));
    let high = weighted_sobolev(theta, s, Some(&bank.band_multiplier(Band::AtOrAbove, cutoff)));
    split_ratio(low, high)
}

/// Which way an L^p band ratio is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    LowOverHigh,
    HighOverLow,
}

/// Where the cutoff J itself is assigned.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Split {
    /// low = Δ_{<J}, high = Δ_{≥J}
    Strict,
    /// low = Δ_{≤J}, high = Δ_{>J}
    Inclusive,
}

impl Split {
    pub fn low_band(self) -> Band {
        match self {
            Split::Strict => Band::Below,
            Split::Inclusive => Band::AtOrBelow,
        }
    }
}

/// Low and high L^p norms of w about J.
pub fn band_lp_pair(bank: &FilterBank, w: &SpectralField, cutoff: f64, p: f64, split: Split) -> Result<(f64, f64)> {
    check_p(p)?;
    w.check_finite()?;
    let low_band = split.low_band();
    let low = band_lp(w, &bank.band_multiplier(low_band, cutoff), p)?;
    let high = band_lp(w, &bank.band_multiplier(low_band.complement(), cutoff), p)?;
    Ok((low, high))
}

/// Ratio of L^p norms of the low and high parts of w about J.
pub fn lp_ratio(
    bank: &FilterBank,
    w: &SpectralField,
    cutoff: f64,
    p: f64,
    orientation: Orientation,
    split: Split,
) -> Result<f64> {
    let (low, high) = band_lp_pair(bank, w, cutoff, p, split)?;
    ratio_from_parts(low, high, orientation)
}

/// Applies the vanishing conventions to precomputed band norms.
pub fn ratio_from_parts(low: f64, high: f64, orientation: Orientation) -> Result<f64> {
    match orientation {
        Orientation::LowOverHigh => split_ratio(low, high),
        Orientation::HighOverLow => split_ratio(high, low),
    }
}

/// Which norms a [`NormReport`] records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormRequest {
    #[serde(default)]
    pub lp: Vec<f64>,
    #[serde(default)]
    pub sobolev: Vec<f64>,
    #[serde(default)]
    pub besov: Vec<(f64, f64)>,
}

impl Default for NormRequest {
    fn default() -> Self {
        Self {
            lp: vec![2.0, f64::INFINITY],
            sobolev: vec![0.0, 1.0],
            besov: Vec::new(),
        }
    }
}

/// One `(order, value)` entry of a norm map.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub order: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesovEntry {
    pub s: f64,
    pub p: f64,
    pub value: f64,
}

/// Norm fingerprint of a field at one time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormReport {
    pub time: f64,
    pub lp_norms: Vec<Entry>,
    pub sobolev: Vec<Entry>,
    pub besov: Vec<BesovEntry>,
    /// L² shell energies ||Δ_jθ||₂.
    pub shell: ShellSpectrum,
}

impl NormReport {
    pub fn compute(bank: &FilterBank, theta: &SpectralField, time: f64, request: &NormRequest) -> Result<Self> {
        theta.check_finite()?;
        let shell = shell_spectrum(bank, theta, 2.0)?;
        let mut physical = None;
        let lp_norms = request
            .lp
            .iter()
            .map(|&p| {
                check_p(p)?;
                let value = if p == 2.0 {
                    theta.l2_norm()
                } else if p.is_infinite() {
                    theta.sup_norm()
                } else {
                    let samples = physical.get_or_insert_with(|| theta.to_physical());
                    crate::spectral::lp_norm_of_samples(samples, theta.grid(), p)?
                };
                Ok(Entry { order: p, value })
            })
            .collect::<Result<Vec<_>>>()?;
        let sobolev = request
            .sobolev
            .iter()
            .map(|&s| Ok(Entry { order: s, value: sobolev_norm(theta, s)? }))
            .collect::<Result<Vec<_>>>()?;
        let besov = request
            .besov
            .iter()
            .map(|&(s, p)| {
                let value = if p == 2.0 {
                    shell.weighted_sup(s)
                } else {
                    besov_norm(bank, theta, s, p)?
                };
                Ok(BesovEntry { s, p, value })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            time,
            lp_norms,
            sobolev,
            besov,
            shell,
        })
    }

    pub fn lp(&self, p: f64) -> Option<f64> {
        self.lp_norms.iter().find(|e| e.order == p).map(|e| e.value)
    }

    pub fn hs(&self, s: f64) -> Option<f64> {
        self.sobolev.iter().find(|e| e.order == s).map(|e| e.value)
    }

    pub fn besov(&self, s: f64, p: f64) -> Option<f64> {
        self.besov
            .iter()
            .find(|e| e.s == s && e.p == p)
            .map(|e| e.value)
    }

    pub fn all_finite(&self) -> bool {
        self.lp_norms.iter().all(|e| e.value.is_finite())
            && self.sobolev.iter().all(|e| e.value.is_finite())
            && self.besov.iter().all(|e| e.value.is_finite())
            && self.shell.values.iter().all(|v| v.is_finite())
    }
}
