use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{GridSpec, SpectralField};

/// Smooth radial cutoff: 1 on r ≤ 1/2, 0 on r ≥ 1, C^∞ in between.
///
/// The transition is the standard quotient of `exp(−1/t)` bumps in the
/// variable x = 2r − 1, so every derivative vanishes at both ends.
pub fn chi(r: f64) -> f64 {
    if r <= 0.5 {
        1.0
    } else if r >= 1.0 {
        0.0
    } else {
        let x = 2.0 * r - 1.0;
        let up = (-1.0 / (1.0 - x)).exp();
        let down = (-1.0 / x).exp();
        up / (up + down)
    }
}

/// Which side of a cutoff J a projection keeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Band {
    /// Δ_{<J}
    Below,
    /// Δ_{≤J}
    AtOrBelow,
    /// Δ_{>J}
    Above,
    /// Δ_{≥J}
    AtOrAbove,
}

impl Band {
    /// The complementary band (Δ_{<J} ↔ Δ_{≥J}, Δ_{≤J} ↔ Δ_{>J}).
    pub fn complement(self) -> Self {
        match self {
            Band::Below => Band::AtOrAbove,
            Band::AtOrBelow => Band::Above,
            Band::Above => Band::AtOrBelow,
            Band::AtOrAbove => Band::Below,
        }
    }

    pub fn is_low(self) -> bool {
        matches!(self, Band::Below | Band::AtOrBelow)
    }
}

/// Result of a single-shell projection.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellProjection {
    pub field: SpectralField,
    /// Set when the requested shell index lies outside the bank's range;
    /// the field is then zero.
    pub out_of_range: bool,
}

/// Precomputed dyadic multipliers φ_j on a lattice.
///
/// Interior shells use φ_j(ξ) = χ(ξ/2^{j+1}) − χ(ξ/2^j). The lowest shell
/// `j_min` is the boundary block χ(ξ/2^{j_min+1}) and the highest `j_max`
/// is 1 − χ(ξ/2^{j_max}), so the shells sum to one at every nonzero
/// lattice point. The mean mode belongs to no shell.
#[derive(Debug, Clone)]
pub struct FilterBank {
    grid: GridSpec,
    j_min: i32,
    j_max: i32,
    radius: Vec<f64>,
    chi: Vec<f64>,
    phi: Vec<Vec<f64>>,
    overflow_modes: usize,
}

impl FilterBank {
    /// Shell range: j_min two octaves below the fundamental frequency
    /// (−2 for L = 2π) and j_max = ⌈log₂ of the dealiased radius⌉.
    pub fn new(grid: GridSpec) -> Self {
        let j_min = grid.fundamental().log2().floor() as i32 - 2;
        let j_max = (grid.dealias_cutoff() * grid.fundamental()).log2().ceil() as i32;
        Self::with_range(grid, j_min, j_max).expect("default shell range is valid")
    }

    pub fn with_range(grid: GridSpec, j_min: i32, j_max: i32) -> Result<Self> {
        if j_max <= j_min {
            return Err(Error::InvalidParameter(format!(
                "empty shell range [{j_min}, {j_max}]"
            )));
        }
        let radius: Vec<f64> = grid.lattice().map(|(_, a, b)| grid.xi_norm(a, b)).collect();
        let chi_values = radius.iter().map(|&r| chi(r)).collect();
        let scaled_chi = |r: f64, j: i32| chi(r / 2f64.powi(j));
        let phi = (j_min..=j_max)
            .map(|j| {
                radius
                    .iter()
                    .enumerate()
                    .map(|(idx, &r)| {
                        if idx == 0 {
                            0.0
                        } else if j == j_min {
                            scaled_chi(r, j + 1)
                        } else if j == j_max {
                            1.0 - scaled_chi(r, j)
                        } else {
                            scaled_chi(r, j + 1) - scaled_chi(r, j)
                        }
                    })
                    .collect()
            })
            .collect();
        let hi = 2f64.powi(j_max);
        let lo = 2f64.powi(j_min);
        let overflow_modes = radius
            .iter()
            .skip(1)
            .filter(|&&r| r > hi || r < lo)
            .count();
        Ok(Self {
            grid,
            j_min,
            j_max,
            radius,
            chi: chi_values,
            phi,
            overflow_modes,
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn j_min(&self) -> i32 {
        self.j_min
    }

    pub fn j_max(&self) -> i32 {
        self.j_max
    }

    pub fn j_range(&self) -> std::ops::RangeInclusive<i32> {
        self.j_min..=self.j_max
    }

    pub fn contains(&self, j: i32) -> bool {
        self.j_range().contains(&j)
    }

    /// Lattice points assigned to a boundary shell because |ξ| falls
    /// outside [2^{j_min}, 2^{j_max}].
    pub fn overflow_modes(&self) -> usize {
        self.overflow_modes
    }

    /// |ξ| per lattice point (flat order).
    pub fn radius(&self) -> &[f64] {
        &self.radius
    }

    /// χ(ξ) per lattice point.
    pub fn chi_values(&self) -> &[f64] {
        &self.chi
    }

    /// φ_j per lattice point; `None` outside the range.
    pub fn phi(&self, j: i32) -> Option<&[f64]> {
        if self.contains(j) {
            Some(&self.phi[(j - self.j_min) as usize])
        } else {
            None
        }
    }

    /// max over nonzero lattice points of |Σ_j φ_j(ξ) − 1|.
    pub fn partition_defect(&self) -> f64 {
        (1..self.grid.len())
            .map(|idx| {
                let s: f64 = self.phi.iter().map(|p| p[idx]).sum();
                (s - 1.0).abs()
            })
            .fold(0.0, f64::max)
    }

    /// Δ_j θ.
    pub fn project_shell(&self, theta: &SpectralField, j: i32) -> ShellProjection {
        self.assert_grid(theta);
        match self.phi(j) {
            Some(m) => ShellProjection {
                field: theta.apply_multiplier(m),
                out_of_range: false,
            },
            None => ShellProjection {
                field: SpectralField::zeros(*theta.grid()),
                out_of_range: true,
            },
        }
    }

    /// Multiplier of a band projection at cutoff J (any real J).
    ///
    /// Δ_{<J} uses χ(ξ/2^J) and Δ_{≤J} uses χ(ξ/2^{J+1}); for integer J these
    /// equal the partial shell sums. Cutoffs past the top shell keep every
    /// nonzero mode. High bands are the complements within the mean-free part.
    pub fn band_multiplier(&self, band: Band, cutoff: f64) -> Vec<f64> {
        let scale = match band {
            Band::Below | Band::AtOrAbove => cutoff,
            Band::AtOrBelow | Band::Above => cutoff + 1.0,
        };
        let low: Vec<f64> = self
            .radius
            .iter()
            .enumerate()
            .map(|(idx, &r)| {
                if idx == 0 {
                    0.0
                } else if scale > self.j_max as f64 {
                    1.0
                } else if scale == f64::NEG_INFINITY {
                    0.0
                } else {
                    chi(r / scale.exp2())
                }
            })
            .collect();
        if band.is_low() {
            low
        } else {
            low.iter()
                .enumerate()
                .map(|(idx, l)| if idx == 0 { 0.0 } else { 1.0 - l })
                .collect()
        }
    }

    /// Band projection Δ_{<J}, Δ_{≤J}, Δ_{>J} or Δ_{≥J}.
    pub fn project_band(&self, theta: &SpectralField, band: Band, cutoff: f64) -> SpectralField {
        self.assert_grid(theta);
        theta.apply_multiplier(&self.band_multiplier(band, cutoff))
    }

    /// Δ_{<J} θ.
    pub fn project_below(&self, theta: &SpectralField, cutoff: f64) -> SpectralField {
        self.project_band(theta, Band::Below, cutoff)
    }

    /// Δ_{≥J} θ = (θ − mean) − Δ_{<J} θ.
    pub fn project_at_or_above(&self, theta: &SpectralField, cutoff: f64) -> SpectralField {
        self.project_band(theta, Band::AtOrAbove, cutoff)
    }

    /// Δ_{≤J} θ.
    pub fn project_at_or_below(&self, theta: &SpectralField, cutoff: f64) -> SpectralField {
        self.project_band(theta, Band::AtOrBelow, cutoff)
    }

    /// Δ_{>J} θ.
    pub fn project_above(&self, theta: &SpectralField, cutoff: f64) -> SpectralField {
        self.project_band(theta, Band::Above, cutoff)
    }

    /// Equivalence constant c_eq between the shell-ℓ² expression
    /// (Σ_j (2^{js}||Δ_jθ||₂)²)^{1/2} and ||θ||_{Ḣ^s}: both are diagonal in
    /// Fourier space, so the sharp band is the range of the per-mode ratio.
    pub fn equivalence_constant(&self, s: f64) -> f64 {
        let mut lo = f64::INFINITY;
        let mut hi: f64 = 0.0;
        for idx in 1..self.grid.len() {
            let r = self.radius[idx];
            let shell: f64 = self
                .phi
                .iter()
                .enumerate()
                .map(|(i, p)| {
                    let j = self.j_min + i as i32;
                    (2f64.powf(j as f64 * s) * p[idx]).powi(2)
                })
                .sum();
            let ratio = (shell / r.powf(2.0 * s)).sqrt();
            lo = lo.min(ratio);
            hi = hi.max(ratio);
        }
        hi.max(1.0 / lo)
    }

    fn assert_grid(&self, theta: &SpectralField) {
        assert_eq!(
            theta.grid(),
            &self.grid,
            "field and filter bank are on different grids"
        );
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn cos_mode(grid: GridSpec, k: i64, amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        f.set_mode(k, 0, Complex64::new(amp / 2.0, 0.0));
        f
    }

    #[test]
    fn chi_profile() {
        assert_eq!(chi(0.0), 1.0);
        assert_eq!(chi(0.5), 1.0);
        assert_eq!(chi(1.0), 0.0);
        assert_eq!(chi(3.0), 0.0);
        assert!((chi(0.75) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let v = chi(0.5 + i as f64 / 200.0);
            assert!(v <= prev);
            prev = v;
        }
    }

    #[test]
    fn default_range_for_two_pi_box() {
        let bank = FilterBank::new(GridSpec::periodic(128).unwrap());
        assert_eq!(bank.j_min(), -2);
        // dealiased radius 42.67 → ⌈log₂⌉ = 6
        assert_eq!(bank.j_max(), 6);
        assert!(bank.overflow_modes() > 0);
    }

    #[test]
    fn partition_of_unity() {
        for n in [16, 64, 128] {
            let bank = FilterBank::new(GridSpec::periodic(n).unwrap());
            assert!(bank.partition_defect() <= 1e-14);
        }
        let bank = FilterBank::new(GridSpec::new(64, 11.0).unwrap());
        assert!(bank.partition_defect() <= 1e-14);
    }

    #[test]
    fn unit_mode_sits_in_shell_zero() {
        let g = GridSpec::periodic(32).unwrap();
        let bank = FilterBank::new(g);
        let theta = cos_mode(g, 1, 1.0);
        for j in bank.j_range() {
            let p = bank.project_shell(&theta, j);
            assert!(!p.out_of_range);
            if j == 0 {
                assert_eq!(p.field, theta);
            } else {
                assert!(p.field.is_zero());
            }
        }
        let out = bank.project_shell(&theta, 40);
        assert!(out.out_of_range && out.field.is_zero());
    }

    #[test]
    fn band_projection_examples() {
        let g = GridSpec::periodic(64).unwrap();
        let bank = FilterBank::new(g);
        let low = cos_mode(g, 1, 1.0);
        let theta = &low + &cos_mode(g, 8, 1.0);
        assert_eq!(bank.project_below(&theta, 2.0), low);
        assert!(bank.project_below(&theta, -5.0).is_zero());
        assert_eq!(bank.project_below(&theta, 40.0), theta);
        let high = bank.project_at_or_above(&theta, 2.0);
        assert!((&(&high + &low) - &theta).max_abs_coeff() < 1e-16);
        // integer cutoffs agree with partial shell sums
        let summed = (bank.j_min()..3).fold(SpectralField::zeros(g), |acc, j| {
            &acc + &bank.project_shell(&theta, j).field
        });
        assert!((&summed - &bank.project_below(&theta, 3.0)).max_abs_coeff() < 1e-15);
        let le = bank.project_at_or_below(&theta, 2.0);
        let lt = bank.project_below(&theta, 3.0);
        assert!((&le - &lt).max_abs_coeff() < 1e-15);
    }

    #[test]
    fn almost_orthogonality_of_shells() {
        let bank = FilterBank::new(GridSpec::periodic(64).unwrap());
        for i in bank.j_range() {
            for j in bank.j_range() {
                if (i - j).abs() >= 2 {
                    let pi = bank.phi(i).unwrap();
                    let pj = bank.phi(j).unwrap();
                    assert!(pi.iter().zip(pj).all(|(a, b)| a * b == 0.0));
                }
            }
        }
    }

    #[test]
    fn equivalence_constant_is_at_least_one() {
        let bank = FilterBank::new(GridSpec::periodic(64).unwrap());
        for s in [0.0, 0.5, 1.6] {
            let c = bank.equivalence_constant(s);
            assert!((1.0..4.0).contains(&c), "c_eq({s}) = {c}");
        }
    }
}
