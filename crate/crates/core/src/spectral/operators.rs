//! SQG operators: Riesz velocity, fractional Laplacian, gradient and the
//! dealiased transport term.

use num_complex::Complex64;

use super::field::{SpectralField, VectorField, VelocityField};
use super::fft;
use crate::error::{Error, Result};

const I: Complex64 = Complex64::new(0.0, 1.0);

/// u = (−R₂θ, R₁θ) with the Riesz symbol R_j ↔ −iξ_j/|ξ|.
///
/// The zero mode and the unpaired Nyquist lines map to zero.
pub fn riesz_velocity(theta: &SpectralField) -> Result<VelocityField> {
    theta.check_finite()?;
    Ok(riesz_velocity_unchecked(theta))
}

pub(crate) fn riesz_velocity_unchecked(theta: &SpectralField) -> VelocityField {
    let g = *theta.grid();
    let n = g.len();
    let mut u1 = vec![Complex64::default(); n];
    let mut u2 = vec![Complex64::default(); n];
    for (idx, a, b) in g.lattice() {
        if idx == 0 || g.is_nyquist(a, b) {
            continue;
        }
        let (x1, x2) = g.xi(a, b);
        let r = x1.hypot(x2);
        let c = theta.coeffs()[idx];
        u1[idx] = I * (x2 / r) * c;
        u2[idx] = -I * (x1 / r) * c;
    }
    VectorField {
        c1: SpectralField::from_raw(g, u1),
        c2: SpectralField::from_raw(g, u2),
    }
}

/// Λ^{2β}θ: multiplies each mode by |ξ|^{2β}.
///
/// For β > 0 the mean maps to zero; β = 0 is the identity. Negative β
/// requires a mean-zero field.
pub fn fractional_laplacian(theta: &SpectralField, beta: f64) -> Result<SpectralField> {
    if !beta.is_finite() {
        return Err(Error::InvalidParameter(format!("exponent beta = {beta}")));
    }
    theta.check_finite()?;
    if beta == 0.0 {
        return Ok(theta.clone());
    }
    if beta < 0.0 && theta.coeffs()[0].norm() > 0.0 {
        return Err(Error::Domain(format!(
            "negative exponent beta = {beta} applied to a field with nonzero mean {}",
            theta.mean()
        )));
    }
    let g = *theta.grid();
    Ok(theta.map_real_symbol(|a, b| {
        if a == 0 && b == 0 {
            0.0
        } else {
            g.xi_norm(a, b).powf(2.0 * beta)
        }
    }))
}

/// ∇θ: multiplies by iξ_j, Nyquist lines zeroed.
pub fn gradient(theta: &SpectralField) -> Result<VectorField> {
    theta.check_finite()?;
    Ok(gradient_unchecked(theta))
}

pub(crate) fn gradient_unchecked(theta: &SpectralField) -> VectorField {
    let g = *theta.grid();
    let n = g.len();
    let mut d1 = vec![Complex64::default(); n];
    let mut d2 = vec![Complex64::default(); n];
    for (idx, a, b) in g.lattice() {
        if g.is_nyquist(a, b) {
            continue;
        }
        let (x1, x2) = g.xi(a, b);
        let c = theta.coeffs()[idx];
        d1[idx] = I * x1 * c;
        d2[idx] = I * x2 * c;
    }
    VectorField {
        c1: SpectralField::from_raw(g, d1),
        c2: SpectralField::from_raw(g, d2),
    }
}

/// Spectral coefficients of u·∇θ, computed pseudo-spectrally with the
/// dealiasing mask applied to θ before the product and to the result after.
pub fn advection_term(theta: &SpectralField) -> Result<SpectralField> {
    theta.check_finite()?;
    Ok(advection_unchecked(theta))
}

pub(crate) fn advection_unchecked(theta: &SpectralField) -> SpectralField {
    let filtered = theta.dealiased();
    let u = riesz_velocity_unchecked(&filtered);
    let grad = gradient_unchecked(&filtered);
    transport_product(&u, &grad)
}

/// Dealiased pseudo-spectral v·∇φ given v and ∇φ in spectral form.
pub(crate) fn transport_product(v: &VectorField, grad: &VectorField) -> SpectralField {
    let g = *v.grid();
    let (v1, v2) = SpectralField::to_physical_pair(&v.c1, &v.c2);
    let (d1, d2) = SpectralField::to_physical_pair(&grad.c1, &grad.c2);
    let mut prod: Vec<Complex64> = (0..g.len())
        .map(|i| Complex64::new(v1[i] * d1[i] + v2[i] * d2[i], 0.0))
        .collect();
    fft::forward(&mut prod, g.n());
    let norm = 1.0 / g.len() as f64;
    for (idx, a, b) in g.lattice() {
        if g.is_retained(a, b) {
            prod[idx] *= norm;
        } else {
            prod[idx] = Complex64::default();
        }
    }
    SpectralField::from_raw(g, prod)
}

/// Largest |u| on the grid for the Riesz velocity of θ.
pub fn max_speed(theta: &SpectralField) -> f64 {
    riesz_velocity_unchecked(&theta.dealiased())
        .magnitude_samples()
        .into_iter()
        .fold(0.0, f64::max)
}

/// θ_λ(x) = λ^{2α−1} θ(λx) for a dyadic λ = 2^m.
///
/// The coefficient array is kept and the box shrinks to L/λ, so wavevector
/// labels are unchanged while physical frequencies scale by λ. The caller
/// rescales time by λ^{2α}.
pub fn rescale_solution(theta: &SpectralField, lambda: f64, alpha: f64) -> Result<SpectralField> {
    let m = dyadic_exponent(lambda)?;
    if !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha}")));
    }
    let grid = theta.grid().with_box_length(theta.grid().box_length() / lambda)?;
    let amplitude = 2f64.powf(m as f64 * (2.0 * alpha - 1.0));
    theta.scaled(amplitude).relabel(grid)
}

fn dyadic_exponent(lambda: f64) -> Result<i32> {
    if lambda.is_finite() && lambda > 0.0 {
        let m = lambda.log2().round();
        if m.abs() <= 60.0 && 2f64.powi(m as i32) == lambda {
            return Ok(m as i32);
        }
    }
    Err(Error::InvalidParameter(format!(
        "rescaling factor {lambda} is not an integer power of two"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::GridSpec;

    fn mode(grid: GridSpec, k1: i64, k2: i64, amp: f64) -> SpectralField {
        let mut f = SpectralField::zeros(grid);
        f.set_mode(k1, k2, Complex64::new(amp / 2.0, 0.0));
        f
    }

    fn samples_of(grid: GridSpec, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        grid.lattice()
            .map(|(_, i, j)| f(i as f64 * grid.dx(), j as f64 * grid.dx()))
            .collect()
    }

    fn max_diff(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
    }

    #[test]
    fn riesz_of_cos_x1_is_sin_x1_in_second_component() {
        let g = GridSpec::periodic(32).unwrap();
        let u = riesz_velocity(&mode(g, 1, 0, 1.0)).unwrap();
        let expect = samples_of(g, |x1, _| x1.sin());
        assert!(max_diff(&u.c1.to_physical(), &vec![0.0; g.len()]) < 1e-14);
        assert!(max_diff(&u.c2.to_physical(), &expect) < 1e-14);
    }

    #[test]
    fn riesz_of_cos_x2() {
        let g = GridSpec::periodic(32).unwrap();
        let u = riesz_velocity(&mode(g, 0, 1, 1.0)).unwrap();
        let expect = samples_of(g, |_, x2| -x2.sin());
        assert!(max_diff(&u.c1.to_physical(), &expect) < 1e-14);
        assert!(u.c2.is_zero());
        let zero = riesz_velocity(&SpectralField::zeros(g)).unwrap();
        assert!(zero.c1.is_zero() && zero.c2.is_zero());
    }

    #[test]
    fn fractional_laplacian_examples() {
        let g = GridSpec::periodic(32).unwrap();
        let c1 = mode(g, 1, 0, 1.0);
        for beta in [0.0, 0.25, 0.7, -0.4] {
            let out = fractional_laplacian(&c1, beta).unwrap();
            assert!(max_diff(&out.to_physical(), &c1.to_physical()) < 1e-14);
        }
        let out = fractional_laplacian(&mode(g, 2, 0, 1.0), 0.25).unwrap();
        let expect = samples_of(g, |x1, _| 2f64.sqrt() * (2.0 * x1).cos());
        assert!(max_diff(&out.to_physical(), &expect) < 1e-13);

        let mut constant = SpectralField::zeros(g);
        constant.set_mode(0, 0, Complex64::new(3.0, 0.0));
        assert!(fractional_laplacian(&constant, 0.5).unwrap().is_zero());
        assert_eq!(fractional_laplacian(&constant, 0.0).unwrap(), constant);
        assert!(matches!(
            fractional_laplacian(&constant, -0.5),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        let g = GridSpec::periodic(32).unwrap();
        let d = gradient(&mode(g, 1, 0, 1.0)).unwrap();
        assert!(max_diff(&d.c1.to_physical(), &samples_of(g, |x1, _| -x1.sin())) < 1e-14);
        assert!(d.c2.is_zero());
        let d = gradient(&mode(g, 0, 2, 1.0)).unwrap();
        assert!(d.c1.is_zero());
        assert!(
            max_diff(&d.c2.to_physical(), &samples_of(g, |_, x2| -2.0 * (2.0 * x2).sin())) < 1e-13
        );
        let mut constant = SpectralField::zeros(g);
        constant.set_mode(0, 0, Complex64::new(1.0, 0.0));
        let d = gradient(&constant).unwrap();
        assert!(d.c1.is_zero() && d.c2.is_zero());
    }

    #[test]
    fn advection_of_single_mode_vanishes() {
        let g = GridSpec::periodic(32).unwrap();
        let adv = advection_term(&mode(g, 1, 0, 1.0)).unwrap();
        assert!(adv.max_abs_coeff() < 1e-15);
        assert!(advection_term(&SpectralField::zeros(g)).unwrap().is_zero());
    }

    #[test]
    fn rescale_examples() {
        let g = GridSpec::periodic(32).unwrap();
        let f = mode(g, 3, 1, 1.0);
        assert_eq!(rescale_solution(&f, 1.0, 0.25).unwrap(), f);
        let r = rescale_solution(&f, 2.0, 0.25).unwrap();
        assert!((r.grid_sup() - f.grid_sup() * 2f64.powf(-0.5)).abs() < 1e-14);
        assert!((r.grid().box_length() - g.box_length() / 2.0).abs() < 1e-15);
        assert!(rescale_solution(&SpectralField::zeros(g), 4.0, 0.3).unwrap().is_zero());
        assert!(rescale_solution(&f, 3.0, 0.25).is_err());
        assert!(rescale_solution(&f, 0.5, 0.25).is_ok());
    }
}
