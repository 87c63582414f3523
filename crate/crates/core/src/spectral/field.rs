use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::fft;
use super::grid::GridSpec;
use crate::error::{Error, Result};

/// A real scalar field on a periodic grid, stored as Fourier coefficients.
///
/// `coeffs[grid.flat(a, b)]` is the amplitude of `exp(i ξ·x)` with
/// `ξ = grid.xi(a, b)`, normalised so that `θ(x) = Σ_k coeffs(k) e^{iξ·x}`.
/// Real fields satisfy `coeffs(−k) = conj(coeffs(k))`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralField {
    grid: GridSpec,
    coeffs: Vec<Complex64>,
}

/// Relative Hermitian-symmetry defect accepted by [`SpectralField::from_coeffs`].
pub const HERMITIAN_TOL: f64 = 1e-10;

impl SpectralField {
    pub fn zeros(grid: GridSpec) -> Self {
        Self {
            grid,
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    /// Wraps a coefficient array, checking size, finiteness and symmetry.
    pub fn from_coeffs(grid: GridSpec, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        let field = Self { grid, coeffs };
        field.check_finite()?;
        let scale = field.max_abs_coeff();
        if field.hermitian_defect() > HERMITIAN_TOL * scale.max(f64::MIN_POSITIVE) {
            return Err(Error::Domain(
                "coefficients are not Hermitian-symmetric (field is not real)".into(),
            ));
        }
        Ok(field)
    }

    /// Trusted constructor for operators that preserve symmetry by construction.
    pub(crate) fn from_raw(grid: GridSpec, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        Self { grid, coeffs }
    }

    /// Forward transform of real samples laid out as `samples[i * n + j]`
    /// at `x = (i·dx, j·dx)`.
    pub fn from_physical(grid: GridSpec, samples: &[f64]) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                got: samples.len(),
            });
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("physical samples"));
        }
        let mut data: Vec<Complex64> = samples.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        fft::forward(&mut data, grid.n());
        let norm = 1.0 / grid.len() as f64;
        data.iter_mut().for_each(|c| *c *= norm);
        Ok(Self { grid, coeffs: data })
    }

    /// Samples on the physical grid.
    pub fn to_physical(&self) -> Vec<f64> {
        let mut data = self.coeffs.clone();
        fft::inverse(&mut data, self.grid.n());
        data.into_iter().map(|c| c.re).collect()
    }

    /// Transforms two real fields with a single complex inverse FFT.
    pub fn to_physical_pair(a: &Self, b: &Self) -> (Vec<f64>, Vec<f64>) {
        assert_eq!(a.grid, b.grid, "grid mismatch");
        let i = Complex64::new(0.0, 1.0);
        let mut data: Vec<Complex64> = a
            .coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| x + i * y)
            .collect();
        fft::inverse(&mut data, a.grid.n());
        data.into_iter().map(|c| (c.re, c.im)).unzip()
    }

    #[inline]
    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    #[inline]
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub(crate) fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    /// Coefficient of wavevector (k1, k2).
    pub fn coeff(&self, k1: i64, k2: i64) -> Complex64 {
        self.coeffs[self.grid.flat_k(k1, k2)]
    }

    /// Sets the amplitude of (k1, k2) and its conjugate partner.
    ///
    /// Self-conjugate modes (zero mode, Nyquist corners) keep only the real part.
    pub fn set_mode(&mut self, k1: i64, k2: i64, value: Complex64) {
        let idx = self.grid.flat_k(k1, k2);
        let partner = self.grid.flat_k(-k1, -k2);
        if idx == partner {
            self.coeffs[idx] = Complex64::new(value.re, 0.0);
        } else {
            self.coeffs[idx] = value;
            self.coeffs[partner] = value.conj();
        }
    }

    /// Spatial mean, the zero mode.
    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    pub fn without_mean(&self) -> Self {
        let mut out = self.clone();
        out.coeffs[0] = Complex64::default();
        out
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Largest |coeffs(−k) − conj(coeffs(k))|.
    pub fn hermitian_defect(&self) -> f64 {
        self.grid
            .lattice()
            .map(|(idx, a, b)| {
                let p = self.grid.conjugate_flat(a, b);
                (self.coeffs[p] - self.coeffs[idx].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.is_finite() {
            Ok(())
        } else {
            Err(Error::NonFinite("spectral coefficients"))
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Multiplies every coefficient by a real even symbol m(a, b).
    pub fn map_real_symbol(&self, symbol: impl Fn(usize, usize) -> f64) -> Self {
        let g = self.grid;
        let coeffs = g
            .lattice()
            .map(|(idx, a, b)| self.coeffs[idx] * symbol(a, b))
            .collect();
        Self::from_raw(g, coeffs)
    }

    /// Multiplies coefficients elementwise by a precomputed real multiplier.
    pub fn apply_multiplier(&self, multiplier: &[f64]) -> Self {
        assert_eq!(multiplier.len(), self.coeffs.len());
        let coeffs = self
            .coeffs
            .iter()
            .zip(multiplier)
            .map(|(c, m)| c * m)
            .collect();
        Self::from_raw(self.grid, coeffs)
    }

    /// Zeroes every mode with |k|_∞ above the dealiasing cutoff.
    pub fn dealiased(&self) -> Self {
        let g = self.grid;
        self.map_real_symbol(|a, b| if g.is_retained(a, b) { 1.0 } else { 0.0 })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_raw(self.grid, self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Σ over lattice of |c|²; ||θ||₂² = L²·this.
    pub fn coeff_energy(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum()
    }

    /// L² norm by Parseval (mean included).
    pub fn l2_norm(&self) -> f64 {
        self.grid.box_length() * self.coeff_energy().sqrt()
    }

    /// ∫ θ·φ dx.
    pub fn inner(&self, other: &Self) -> f64 {
        assert_eq!(self.grid, other.grid, "grid mismatch");
        let l2 = self.grid.box_length().powi(2);
        l2 * self
            .coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum::<f64>()
    }

    /// L^p norm by quadrature on the physical grid; `p = ∞` takes the grid maximum.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of_samples(&self.to_physical(), &self.grid, p)
    }

    /// Largest |θ| over the grid points.
    pub fn grid_sup(&self) -> f64 {
        self.to_physical().iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Supremum of |θ| refined off-grid by Newton iteration on the
    /// trigonometric interpolant, started from near-maximal grid points.
    pub fn sup_norm(&self) -> f64 {
        let n = self.grid.n();
        let samples = self.to_physical();
        let grid_max = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
        if grid_max == 0.0 {
            return 0.0;
        }
        let dx = self.grid.dx();
        let at = |i: isize, j: isize| {
            let ii = i.rem_euclid(n as isize) as usize;
            let jj = j.rem_euclid(n as isize) as usize;
            samples[ii * n + jj].abs()
        };
        let mut best = grid_max;
        for i in 0..n as isize {
            for j in 0..n as isize {
                let v = at(i, j);
                if v < 0.9 * grid_max {
                    continue;
                }
                let is_peak = (-1..=1)
                    .flat_map(|di| (-1..=1).map(move |dj| (di, dj)))
                    .filter(|&(di, dj)| di != 0 || dj != 0)
                    .all(|(di, dj)| at(i + di, j + dj) <= v);
                if is_peak {
                    let refined = self.refine_extremum(i as f64 * dx, j as f64 * dx);
                    best = best.max(refined);
                }
            }
        }
        best
    }

    fn refine_extremum(&self, x1: f64, x2: f64) -> f64 {
        let dx = self.grid.dx();
        let (start1, start2) = (x1, x2);
        let (mut y1, mut y2) = (x1, x2);
        let mut best = self.eval_with_derivatives(y1, y2).0.abs();
        for _ in 0..25 {
            let (f, g1, g2, h11, h12, h22) = self.eval_with_derivatives(y1, y2);
            best = best.max(f.abs());
            let det = h11 * h22 - h12 * h12;
            let scale = h11 * h11 + h22 * h22 + 2.0 * h12 * h12;
            if scale < f64::MIN_POSITIVE {
                break;
            }
            let (s1, s2) = if det.abs() > 1e-12 * scale {
                ((h22 * g1 - h12 * g2) / det, (-h12 * g1 + h11 * g2) / det)
            } else {
                // rank-deficient Hessian: step along the curved directions only
                let tiny = 1e-12 * scale.sqrt();
                let d1 = if h11.abs() > tiny { g1 / h11 } else { 0.0 };
                let d2 = if h22.abs() > tiny { g2 / h22 } else { 0.0 };
                (d1, d2)
            };
            y1 -= s1;
            y2 -= s2;
            if (y1 - start1).hypot(y2 - start2) > 2.0 * dx {
                break;
            }
            if s1.hypot(s2) < 1e-14 * self.grid.box_length() {
                best = best.max(self.eval_with_derivatives(y1, y2).0.abs());
                break;
            }
        }
        best
    }

    /// Value, gradient and Hessian of the trigonometric interpolant at x.
    pub fn eval_with_derivatives(&self, x1: f64, x2: f64) -> (f64, f64, f64, f64, f64, f64) {
        let g = self.grid;
        let n = g.n();
        let f = g.fundamental();
        let e1: Vec<Complex64> = (0..n)
            .map(|a| Complex64::from_polar(1.0, f * g.wavenumber(a) as f64 * x1))
            .collect();
        let e2: Vec<Complex64> = (0..n)
            .map(|b| Complex64::from_polar(1.0, f * g.wavenumber(b) as f64 * x2))
            .collect();
        let i = Complex64::new(0.0, 1.0);
        let (mut v, mut d1, mut d2, mut d11, mut d12, mut d22) = (
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
            Complex64::default(),
        );
        for a in 0..n {
            let xi1 = f * g.wavenumber(a) as f64;
            let mut row = Complex64::default();
            let mut row_b = Complex64::default();
            let mut row_bb = Complex64::default();
            for b in 0..n {
                let xi2 = f * g.wavenumber(b) as f64;
                let t = self.coeffs[a * n + b] * e2[b];
                row += t;
                row_b += t * xi2;
                row_bb += t * xi2 * xi2;
            }
            let w = e1[a];
            v += w * row;
            d1 += w * row * i * xi1;
            d2 += w * row_b * i;
            d11 -= w * row * xi1 * xi1;
            d12 -= w * row_b * xi1;
            d22 -= w * row_bb;
        }
        (v.re, d1.re, d2.re, d11.re, d12.re, d22.re)
    }

    /// Point value of the trigonometric interpolant.
    pub fn eval(&self, x1: f64, x2: f64) -> f64 {
        self.eval_with_derivatives(x1, x2).0
    }

    /// Same field on a finer lattice (zero-padded spectrum); `m ≥ n`.
    ///
    /// A Nyquist coefficient is split evenly between ±n/2 so the padded
    /// field stays real and takes the same grid values.
    pub fn zero_padded(&self, m: usize) -> Result<Self> {
        let src = self.grid;
        let n = src.n();
        if m < n {
            return Err(Error::InvalidParameter(format!(
                "cannot pad from {n} down to {m}"
            )));
        }
        let dst = src.resized(m)?;
        let mut out = Self::zeros(dst);
        let half = (n / 2) as i64;
        for (idx, a, b) in src.lattice() {
            let c = self.coeffs[idx];
            if c == Complex64::default() {
                continue;
            }
            let k1 = src.wavenumber(a);
            let k2 = src.wavenumber(b);
            let k1s: &[i64] = if k1 == -half && m > n { &[-half, half] } else { &[k1] };
            let k2s: &[i64] = if k2 == -half && m > n { &[-half, half] } else { &[k2] };
            let w = 1.0 / (k1s.len() * k2s.len()) as f64;
            for &p in k1s {
                for &q in k2s {
                    out.coeffs[dst.flat_k(p, q)] += c * w;
                }
            }
        }
        Ok(out)
    }

    /// Keeps the modes representable on a coarser lattice; `m ≤ n`.
    pub fn truncated(&self, m: usize) -> Result<Self> {
        let src = self.grid;
        if m > src.n() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate from {} up to {m}",
                src.n()
            )));
        }
        let dst = src.resized(m)?;
        let half = (m / 2) as i64;
        let mut out = Self::zeros(dst);
        for (idx, a, b) in src.lattice() {
            let k1 = src.wavenumber(a);
            let k2 = src.wavenumber(b);
            if k1.abs() < half && k2.abs() < half {
                out.coeffs[dst.flat_k(k1, k2)] = self.coeffs[idx];
            }
        }
        Ok(out)
    }

    /// Reinterprets the coefficient array on another grid of equal size.
    pub fn relabel(&self, grid: GridSpec) -> Result<Self> {
        if grid.n() != self.grid.n() {
            return Err(Error::GridMismatch);
        }
        Ok(Self::from_raw(grid, self.coeffs.clone()))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(self - other)
    }
}

/// L^p norm of physical samples by uniform quadrature.
pub fn lp_norm_of_samples(samples: &[f64], grid: &GridSpec, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidParameter(format!(
            "integrability exponent p = {p} must be at least 1"
        )));
    }
    if p.is_infinite() {
        return Ok(samples.iter().map(|v| v.abs()).fold(0.0, f64::max));
    }
    let max = samples.iter().map(|v| v.abs()).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(0.0);
    }
    // scale by the maximum to avoid overflow for large p
    let sum: f64 = samples.iter().map(|v| (v.abs() / max).powf(p)).sum();
    Ok(max * (sum * grid.cell_area()).powf(1.0 / p))
}

impl Add for &SpectralField {
    type Output = SpectralField;

    fn add(self, rhs: Self) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect();
        SpectralField::from_raw(self.grid, coeffs)
    }
}

impl Sub for &SpectralField {
    type Output = SpectralField;

    fn sub(self, rhs: Self) -> SpectralField {
        assert_eq!(self.grid, rhs.grid, "grid mismatch");
        let coeffs = self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect();
        SpectralField::from_raw(self.grid, coeffs)
    }
}

impl Mul<f64> for &SpectralField {
    type Output = SpectralField;

    fn mul(self, rhs: f64) -> SpectralField {
        self.scaled(rhs)
    }
}

impl Neg for &SpectralField {
    type Output = SpectralField;

    fn neg(self) -> SpectralField {
        self.scaled(-1.0)
    }
}

/// A pair of real fields on one grid: a velocity or a gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    pub c1: SpectralField,
    pub c2: SpectralField,
}

/// Velocity from the Riesz-transform law; divergence-free by construction.
pub type VelocityField = VectorField;

impl VectorField {
    pub fn new(c1: SpectralField, c2: SpectralField) -> Result<Self> {
        if c1.grid() != c2.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self { c1, c2 })
    }

    pub fn grid(&self) -> &GridSpec {
        self.c1.grid()
    }

    /// Largest per-mode |iξ₁v̂₁ + iξ₂v̂₂|.
    pub fn max_divergence(&self) -> f64 {
        let g = *self.grid();
        g.lattice()
            .map(|(idx, a, b)| {
                let (x1, x2) = g.xi(a, b);
                (self.c1.coeffs()[idx] * x1 + self.c2.coeffs()[idx] * x2).norm()
            })
            .fold(0.0, f64::max)
    }

    /// Pointwise Euclidean magnitude on the grid.
    pub fn magnitude_samples(&self) -> Vec<f64> {
        let (a, b) = SpectralField::to_physical_pair(&self.c1, &self.c2);
        a.iter().zip(&b).map(|(x, y)| x.hypot(*y)).collect()
    }

    /// L^p norm of the pointwise magnitude.
    pub fn lp_norm(&self, p: f64) -> Result<f64> {
        lp_norm_of_samples(&self.magnitude_samples(), self.grid(), p)
    }

    /// (||v₁||₂² + ||v₂||₂²)^{1/2}.
    pub fn l2_norm(&self) -> f64 {
        self.c1.l2_norm().hypot(self.c2.l2_norm())
    }
}
