use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_DEALIAS: f64 = 2.0 / 3.0;

/// Periodic N×N grid on the box [0, L)².
///
/// Lattice index `a ∈ 0..n` maps to the signed wavenumber `k ∈ -n/2..n/2-1`,
/// physical frequency `ξ = 2πk/L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawGrid", into = "RawGrid")]
pub struct GridSpec {
    n: usize,
    box_length: f64,
    dealias_fraction: f64,
}

#[derive(Serialize, Deserialize)]
struct RawGrid {
    n: usize,
    #[serde(default = "default_box")]
    box_length: f64,
    #[serde(default = "default_dealias")]
    dealias_fraction: f64,
}

fn default_box() -> f64 {
    2.0 * PI
}

fn default_dealias() -> f64 {
    DEFAULT_DEALIAS
}

impl TryFrom<RawGrid> for GridSpec {
    type Error = Error;

    fn try_from(raw: RawGrid) -> Result<Self> {
        GridSpec::with_dealias(raw.n, raw.box_length, raw.dealias_fraction)
    }
}

impl From<GridSpec> for RawGrid {
    fn from(g: GridSpec) -> Self {
        RawGrid {
            n: g.n,
            box_length: g.box_length,
            dealias_fraction: g.dealias_fraction,
        }
    }
}

impl GridSpec {
    pub fn new(n: usize, box_length: f64) -> Result<Self> {
        Self::with_dealias(n, box_length, DEFAULT_DEALIAS)
    }

    /// The 2π-periodic box most examples use.
    pub fn periodic(n: usize) -> Result<Self> {
        Self::new(n, 2.0 * PI)
    }

    pub fn with_dealias(n: usize, box_length: f64, dealias_fraction: f64) -> Result<Self> {
        let mut problems = Vec::new();
        if n < 16 || !n.is_power_of_two() {
            problems.push(format!("n = {n} must be a power of two and at least 16"));
        }
        if !(box_length.is_finite() && box_length > 0.0) {
            problems.push(format!("box_length = {box_length} must be positive"));
        }
        if !(dealias_fraction > 0.0 && dealias_fraction <= 1.0) {
            problems.push(format!(
                "dealias_fraction = {dealias_fraction} must lie in (0, 1]"
            ));
        }
        if problems.is_empty() {
            Ok(Self {
                n,
                box_length,
                dealias_fraction,
            })
        } else {
            Err(Error::InvalidGrid(problems.join("; ")))
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn box_length(&self) -> f64 {
        self.box_length
    }

    #[inline]
    pub fn dealias_fraction(&self) -> f64 {
        self.dealias_fraction
    }

    /// Number of lattice points, n².
    #[inline]
    pub fn len(&self) -> usize {
        self.n * self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dx(&self) -> f64 {
        self.box_length / self.n as f64
    }

    #[inline]
    pub fn cell_area(&self) -> f64 {
        self.dx() * self.dx()
    }

    /// Physical frequency of the unit wavenumber, 2π/L.
    #[inline]
    pub fn fundamental(&self) -> f64 {
        2.0 * PI / self.box_length
    }

    /// Signed wavenumber of a lattice index.
    #[inline]
    pub fn wavenumber(&self, index: usize) -> i64 {
        let half = self.n / 2;
        if index < half {
            index as i64
        } else {
            index as i64 - self.n as i64
        }
    }

    /// Lattice index of a signed wavenumber (taken modulo n).
    #[inline]
    pub fn index_of(&self, k: i64) -> usize {
        k.rem_euclid(self.n as i64) as usize
    }

    /// Flat index of lattice point (a, b) with a ↔ x₁, b ↔ x₂.
    #[inline]
    pub fn flat(&self, a: usize, b: usize) -> usize {
        a * self.n + b
    }

    /// Flat index of the wavevector (k1, k2).
    #[inline]
    pub fn flat_k(&self, k1: i64, k2: i64) -> usize {
        self.flat(self.index_of(k1), self.index_of(k2))
    }

    /// Flat index of the conjugate partner −k.
    #[inline]
    pub fn conjugate_flat(&self, a: usize, b: usize) -> usize {
        let n = self.n;
        self.flat((n - a) % n, (n - b) % n)
    }

    /// Physical frequency vector ξ at lattice point (a, b).
    #[inline]
    pub fn xi(&self, a: usize, b: usize) -> (f64, f64) {
        let f = self.fundamental();
        (f * self.wavenumber(a) as f64, f * self.wavenumber(b) as f64)
    }

    #[inline]
    pub fn xi_norm(&self, a: usize, b: usize) -> f64 {
        let (x1, x2) = self.xi(a, b);
        x1.hypot(x2)
    }

    /// True when either component sits on the unpaired Nyquist wavenumber −n/2.
    #[inline]
    pub fn is_nyquist(&self, a: usize, b: usize) -> bool {
        a == self.n / 2 || b == self.n / 2
    }

    /// Largest retained |k|_∞ under the dealiasing rule.
    #[inline]
    pub fn dealias_cutoff(&self) -> f64 {
        self.dealias_fraction * (self.n / 2) as f64
    }

    /// Largest retained radial frequency |ξ| along an axis.
    pub fn dealias_radius(&self) -> f64 {
        self.dealias_cutoff().floor() * self.fundamental()
    }

    /// Whether the mode survives dealiasing: |k|_∞ ≤ fraction·n/2.
    #[inline]
    pub fn is_retained(&self, a: usize, b: usize) -> bool {
        let cut = self.dealias_cutoff();
        let k1 = self.wavenumber(a).unsigned_abs() as f64;
        let k2 = self.wavenumber(b).unsigned_abs() as f64;
        k1 <= cut && k2 <= cut
    }

    /// Same box, different resolution and dealias fraction preserved.
    pub fn resized(&self, n: usize) -> Result<Self> {
        Self::with_dealias(n, self.box_length, self.dealias_fraction)
    }

    /// Same lattice on a box of a different period.
    pub fn with_box_length(&self, box_length: f64) -> Result<Self> {
        Self::with_dealias(self.n, box_length, self.dealias_fraction)
    }

    /// Iterator over all lattice points as (flat, a, b).
    pub fn lattice(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |a| (0..n).map(move |b| (a * n + b, a, b)))
    }
}
