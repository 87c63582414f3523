//! Initial-data recipes.

use std::f64::consts::TAU;
use std::path::PathBuf;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sqg_core::littlewood_paley::sobolev_norm;
use sqg_core::spectral::random::{random_band_field, stream_rng, BandSpec};
use sqg_core::spectral::{Checkpoint, GridSpec, SpectralField};

use crate::error::{Error, Result};

fn default_slope() -> f64 {
    -2.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum RecipeKind {
    /// cos(2^j x₁ + φ₁) + cos(2^j x₂ + φ₂): the only lattice points where
    /// φ_j = 1, so Δ_jθ = θ.
    SingleShell { j: i32, amplitude: f64 },
    /// Random phases on min_freq ≤ |ξ| ≤ max_freq with shell energy ∝ 2^{slope·j}.
    BandLimitedRandom {
        min_freq: f64,
        max_freq: f64,
        #[serde(default = "default_slope")]
        slope: f64,
        #[serde(default = "one")]
        amplitude: f64,
    },
    /// High part on 2^j ≤ |ξ| ≤ max_freq plus a low part on |ξ| ≤ 2^{j−1}
    /// weighted so that the low/high Ḣ^s ratio at cutoff j is at most `bound`.
    HighFrequencyConcentrated {
        j: i32,
        s: f64,
        bound: f64,
        #[serde(default)]
        max_freq: Option<f64>,
        #[serde(default = "default_slope")]
        slope: f64,
    },
    /// The same split with the low part dominant: low/high Ḣ^s ratio at
    /// cutoff j equals `ratio`.
    LowFrequencyDominated {
        j: i32,
        s: f64,
        ratio: f64,
        #[serde(default)]
        max_freq: Option<f64>,
        #[serde(default = "default_slope")]
        slope: f64,
    },
    /// Opposite-signed Gaussians of width `width` centred `separation` apart
    /// on the horizontal midline, periodised.
    GaussianVortexPair { separation: f64, width: f64, amplitude: f64 },
    Checkpoint { path: PathBuf },
}

fn one() -> f64 {
    1.0
}

/// Rescales a generated field to a prescribed Ḣ^s norm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Normalize {
    pub s: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRecipe {
    #[serde(flatten)]
    pub kind: RecipeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalize: Option<Normalize>,
}

impl From<RecipeKind> for DataRecipe {
    fn from(kind: RecipeKind) -> Self {
        Self { kind, normalize: None }
    }
}

impl DataRecipe {
    pub fn normalized(mut self, s: f64, value: f64) -> Self {
        self.normalize = Some(Normalize { s, value });
        self
    }

    /// Constraint violations that do not depend on the grid.
    pub fn problems(&self, prefix: &str) -> Vec<String> {
        let mut out = Vec::new();
        let mut need = |ok: bool, msg: String| {
            if !ok {
                out.push(format!("{prefix}: {msg}"));
            }
        };
        match &self.kind {
            RecipeKind::SingleShell { amplitude, .. } => {
                need(amplitude.is_finite(), format!("amplitude {amplitude} must be finite"))
            }
            RecipeKind::BandLimitedRandom {
                min_freq,
                max_freq,
                slope,
                amplitude,
            } => {
                need(
                    *min_freq > 0.0 && min_freq <= max_freq,
                    format!("need 0 < min_freq ≤ max_freq, got [{min_freq}, {max_freq}]"),
                );
                need(slope.is_finite(), format!("slope {slope} must be finite"));
                need(amplitude.is_finite(), format!("amplitude {amplitude} must be finite"));
            }
            RecipeKind::HighFrequencyConcentrated { s, bound, .. } => {
                need(s.is_finite(), format!("s = {s} must be finite"));
                need(*bound >= 0.0 && bound.is_finite(), format!("bound {bound} must be finite and ≥ 0"));
            }
            RecipeKind::LowFrequencyDominated { s, ratio, .. } => {
                need(s.is_finite(), format!("s = {s} must be finite"));
                need(*ratio > 0.0 && ratio.is_finite(), format!("ratio {ratio} must be positive"));
            }
            RecipeKind::GaussianVortexPair {
                separation,
                width,
                amplitude,
            } => {
                need(*width > 0.0, format!("width {width} must be positive"));
                need(*separation >= 0.0, format!("separation {separation} must be ≥ 0"));
                need(amplitude.is_finite(), format!("amplitude {amplitude} must be finite"));
            }
            RecipeKind::Checkpoint { .. } => {}
        }
        if let Some(Normalize { s, value }) = self.normalize {
            need(
                value > 0.0 && value.is_finite() && s.is_finite(),
                format!("normalize needs finite s and positive value, got s = {s}, value = {value}"),
            );
        }
        out
    }
}

/// Draws the field of `recipe` on `grid`. Random recipes use ChaCha stream
/// `stream` of `seed`.
pub fn generate(recipe: &DataRecipe, grid: GridSpec, seed: u64, stream: u64) -> Result<SpectralField> {
    let problems = recipe.problems("data");
    if !problems.is_empty() {
        return Err(Error::Config(problems));
    }
    let mut rng = stream_rng(seed, stream);
    let field = match &recipe.kind {
        RecipeKind::SingleShell { j, amplitude } => {
            let k = shell_wavenumber(&grid, *j)?;
            let mut f = SpectralField::zeros(grid);
            for (k1, k2) in [(k, 0), (0, k)] {
                let phase: f64 = rand::Rng::random::<f64>(&mut rng) * TAU;
                let c = Complex64::from_polar(0.5 * amplitude, phase);
                f.set_mode(k1, k2, c);
                f.set_mode(-k1, -k2, c.conj());
            }
            f
        }
        RecipeKind::BandLimitedRandom {
            min_freq,
            max_freq,
            slope,
            amplitude,
        } => {
            check_resolvable(&grid, *max_freq)?;
            random_band_field(grid, &BandSpec::new(*min_freq, *max_freq, *slope), &mut rng).scaled(*amplitude)
        }
        RecipeKind::HighFrequencyConcentrated {
            j,
            s,
            bound,
            max_freq,
            slope,
        } => {
            let (low, high) = split_parts(&grid, *j, *max_freq, *slope, &mut rng)?;
            let (hl, hh) = (sobolev_norm(&low, *s)?, sobolev_norm(&high, *s)?);
            // strictly under the bound after rounding
            let eps = if hl > 0.0 { bound * hh / hl * (1.0 - 1e-12) } else { 0.0 };
            &high + &low.scaled(eps)
        }
        RecipeKind::LowFrequencyDominated {
            j,
            s,
            ratio,
            max_freq,
            slope,
        } => {
            let (low, high) = split_parts(&grid, *j, *max_freq, *slope, &mut rng)?;
            let (hl, hh) = (sobolev_norm(&low, *s)?, sobolev_norm(&high, *s)?);
            if hl == 0.0 {
                return Err(Error::Config(vec![format!(
                    "data: no lattice frequencies below 2^{} for a low part",
                    j - 1
                )]));
            }
            &low + &high.scaled(hl / (ratio * hh))
        }
        RecipeKind::GaussianVortexPair {
            separation,
            width,
            amplitude,
        } => vortex_pair(&grid, *separation, *width, *amplitude)?,
        RecipeKind::Checkpoint { path } => {
            let ck = Checkpoint::load(path).map_err(|e| match e {
                sqg_core::Error::Io(io) => Error::file(path, io),
                other => other.into(),
            })?;
            if ck.field.grid() != &grid {
                return Err(Error::Config(vec![format!(
                    "data: checkpoint {} is on a different grid (n = {}, L = {})",
                    path.display(),
                    ck.field.grid().n(),
                    ck.field.grid().box_length()
                )]));
            }
            ck.field
        }
    };
    match recipe.normalize {
        None => Ok(field),
        Some(Normalize { s, value }) => {
            let h = sobolev_norm(&field, s)?;
            if h == 0.0 {
                return Err(Error::Config(vec!["data: cannot normalize a zero field".into()]));
            }
            Ok(field.scaled(value / h))
        }
    }
}

/// Lattice index k with 2πk/L = 2^j, required to be resolved.
fn shell_wavenumber(grid: &GridSpec, j: i32) -> Result<i64> {
    let k = 2f64.powi(j) / grid.fundamental();
    let rounded = k.round();
    if rounded < 1.0 || (k - rounded).abs() > 1e-9 * k {
        return Err(Error::Config(vec![format!(
            "data: |ξ| = 2^{j} is not a lattice frequency for L = {}",
            grid.box_length()
        )]));
    }
    if rounded > grid.dealias_cutoff() {
        return Err(Error::Config(vec![format!(
            "data: shell {j} (k = {rounded}) lies beyond the resolved cutoff {}",
            grid.dealias_cutoff()
        )]));
    }
    Ok(rounded as i64)
}

fn check_resolvable(grid: &GridSpec, freq: f64) -> Result<()> {
    if freq > grid.dealias_radius() * (1.0 + 1e-12) {
        return Err(Error::Config(vec![format!(
            "data: frequency {freq} lies beyond the resolved radius {}",
            grid.dealias_radius()
        )]));
    }
    Ok(())
}

/// (low on |ξ| ≤ 2^{j−1}, high on 2^j ≤ |ξ| ≤ max_freq), both random phase.
fn split_parts(
    grid: &GridSpec,
    j: i32,
    max_freq: Option<f64>,
    slope: f64,
    rng: &mut rand_chacha::ChaCha8Rng,
) -> Result<(SpectralField, SpectralField)> {
    let lo_edge = 2f64.powi(j);
    let hi_edge = max_freq.unwrap_or(2.0 * lo_edge).min(grid.dealias_radius());
    if hi_edge < lo_edge {
        return Err(Error::Config(vec![format!(
            "data: shell {j} lies beyond the resolved radius {}",
            grid.dealias_radius()
        )]));
    }
    let high = random_band_field(*grid, &BandSpec::new(lo_edge, hi_edge, slope), rng);
    if high.is_zero() {
        return Err(Error::Config(vec![format!("data: no lattice frequencies in [{lo_edge}, {hi_edge}]")]));
    }
    let low = random_band_field(*grid, &BandSpec::new(0.0, 0.5 * lo_edge, slope), rng);
    Ok((low, high))
}

fn vortex_pair(grid: &GridSpec, separation: f64, width: f64, amplitude: f64) -> Result<SpectralField> {
    let n = grid.n();
    let l = grid.box_length();
    let centres = [(0.5 * (l - separation), 0.5 * l, 1.0), (0.5 * (l + separation), 0.5 * l, -1.0)];
    let mut samples = vec![0.0; n * n];
    for i in 0..n {
        for jj in 0..n {
            let (x1, x2) = (i as f64 * grid.dx(), jj as f64 * grid.dx());
            let mut v = 0.0;
            for &(c1, c2, sign) in &centres {
                for m1 in -1..=1 {
                    for m2 in -1..=1 {
                        let d1 = x1 - c1 + m1 as f64 * l;
                        let d2 = x2 - c2 + m2 as f64 * l;
                        v += sign * (-(d1 * d1 + d2 * d2) / (2.0 * width * width)).exp();
                    }
                }
            }
            samples[i * n + jj] = amplitude * v;
        }
    }
    Ok(SpectralField::from_physical(*grid, &samples)?.dealiased().without_mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use sqg_core::littlewood_paley::{shell_spectrum, sparseness_ratio, FilterBank};

    fn grid() -> GridSpec {
        GridSpec::periodic(64).unwrap()
    }

    #[test]
    fn single_shell_lives_in_one_shell() {
        let r: DataRecipe = RecipeKind::SingleShell { j: 3, amplitude: 1.0 }.into();
        let f = generate(&r, grid(), 1, 0).unwrap();
        let bank = FilterBank::new(grid());
        let spec = shell_spectrum(&bank, &f, 2.0).unwrap();
        for (j, e) in spec.iter() {
            if j != 3 {
                assert_eq!(e, 0.0, "shell {j}");
            }
        }
        for s in [0.0, 0.7, 1.6, 3.0] {
            assert_eq!(sparseness_ratio(&bank, &f, 3.0, s).unwrap(), 0.0);
        }
    }

    #[test]
    fn shell_beyond_resolution_rejected() {
        let r: DataRecipe = RecipeKind::SingleShell { j: 5, amplitude: 1.0 }.into();
        assert!(matches!(generate(&r, grid(), 1, 0), Err(Error::Config(_))));
        let r: DataRecipe = RecipeKind::BandLimitedRandom {
            min_freq: 1.0,
            max_freq: 40.0,
            slope: -2.0,
            amplitude: 1.0,
        }
        .into();
        assert!(generate(&r, grid(), 1, 0).is_err());
    }

    #[test]
    fn split_recipes_hit_their_ratios() {
        let bank = FilterBank::new(grid());
        for bound in [0.0, 1e-3, 0.125] {
            let r: DataRecipe = RecipeKind::HighFrequencyConcentrated {
                j: 3,
                s: 1.6,
                bound,
                max_freq: None,
                slope: -2.0,
            }
            .into();
            let f = generate(&r, grid(), 9, 0).unwrap();
            assert!(sparseness_ratio(&bank, &f, 3.0, 1.6).unwrap() <= bound);
        }
        let r: DataRecipe = RecipeKind::LowFrequencyDominated {
            j: 3,
            s: 1.6,
            ratio: 10.0,
            max_freq: None,
            slope: -2.0,
        }
        .into();
        let f = generate(&r, grid(), 9, 0).unwrap();
        assert!((sparseness_ratio(&bank, &f, 3.0, 1.6).unwrap() - 10.0).abs() < 1e-10);
    }

    #[test]
    fn vortex_pair_is_mean_free_and_seed_independent() {
        let r: DataRecipe = RecipeKind::GaussianVortexPair {
            separation: 1.0,
            width: 0.4,
            amplitude: 1.0,
        }
        .into();
        let a = generate(&r, grid(), 1, 0).unwrap();
        assert_eq!(a, generate(&r, grid(), 2, 5).unwrap());
        assert_eq!(a.mean(), 0.0);
        assert!(a.l2_norm() > 0.0);
    }

    #[test]
    fn normalize_sets_sobolev_norm() {
        let r = DataRecipe::from(RecipeKind::BandLimitedRandom {
            min_freq: 1.0,
            max_freq: 8.0,
            slope: -2.0,
            amplitude: 3.0,
        })
        .normalized(1.6, 0.25);
        let f = generate(&r, grid(), 4, 0).unwrap();
        assert!((sobolev_norm(&f, 1.6).unwrap() - 0.25).abs() < 1e-14);
    }
}
