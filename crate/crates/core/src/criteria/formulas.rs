//! Closed-form exponent algebra of the criteria.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

fn positive(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} = {v} must be positive and finite")))
    }
}

/// Requires 0 < α and s ∈ (2−2α, 2−α).
pub fn check_subcritical_range(s: f64, alpha: f64) -> Result<()> {
    positive("alpha", alpha)?;
    if s > 2.0 - 2.0 * alpha && s < 2.0 - alpha {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "s = {s} outside ({}, {}) for alpha = {alpha}",
            2.0 - 2.0 * alpha,
            2.0 - alpha
        )))
    }
}

/// 2α/(s−2+2α), the exponent linking ||θ||_{Ḣ^s} and time.
pub fn time_exponent(s: f64, alpha: f64) -> f64 {
    2.0 * alpha / (s - 2.0 + 2.0 * alpha)
}

/// T_min = C₀ h^{−2α/(s−2+2α)}.
pub fn ju_tmin(h_norm: f64, s: f64, alpha: f64, c0: f64) -> Result<f64> {
    check_subcritical_range(s, alpha)?;
    positive("h_norm", h_norm)?;
    positive("C0", c0)?;
    Ok(c0 * h_norm.powf(-time_exponent(s, alpha)))
}

/// γ = (T_min/T_*)^{(s−2+2α)/(2α)}.
pub fn gamma(t_min: f64, t_star: f64, s: f64, alpha: f64) -> Result<f64> {
    check_subcritical_range(s, alpha)?;
    positive("T_min", t_min)?;
    positive("T_*", t_star)?;
    Ok((t_min / t_star).powf(1.0 / time_exponent(s, alpha)))
}

/// Real cutoff J with 2^{2αJ} = C h^{1+4α/(s−2+2α)} T_*^{1+(s−2+sα)/(2α)}.
pub fn thm1_cutoff(h_norm: f64, t_star: f64, s: f64, alpha: f64, c: f64) -> Result<f64> {
    check_subcritical_range(s, alpha)?;
    positive("h_norm", h_norm)?;
    positive("T_*", t_star)?;
    positive("C", c)?;
    let d = s - 2.0 + 2.0 * alpha;
    let log2_rhs =
        c.log2() + (1.0 + 4.0 * alpha / d) * h_norm.log2() + (1.0 + (s - 2.0 + s * alpha) / (2.0 * alpha)) * t_star.log2();
    Ok(log2_rhs / (2.0 * alpha))
}

/// Time and cutoff of the smallness proposition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropQuantities {
    /// t = (γ/(2C h))^{2α/(s−2+2α)}.
    pub t_check: f64,
    /// Real J with 2^{2αJ} = (2C/γ)(2C h/γ)^{2α/(s−2+2α)}.
    pub j_min: f64,
    /// Smallest integer J ≥ j_min.
    pub j: i32,
}

pub fn prop_quantities(h_norm: f64, s: f64, alpha: f64, gamma: f64, cprop: f64) -> Result<PropQuantities> {
    check_subcritical_range(s, alpha)?;
    positive("h_norm", h_norm)?;
    positive("Cprop", cprop)?;
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::InvalidParameter(format!("gamma = {gamma} outside (0, 1)")));
    }
    let e = time_exponent(s, alpha);
    let t_check = (gamma / (2.0 * cprop * h_norm)).powf(e);
    let log2_rhs = (2.0 * cprop / gamma).log2() + e * (2.0 * cprop * h_norm / gamma).log2();
    let j_min = log2_rhs / (2.0 * alpha);
    Ok(PropQuantities {
        t_check,
        j_min,
        j: j_min.ceil() as i32,
    })
}

/// Exponent of ||∇θ₁||_q in the dynamic cutoff: qα/(q−1), or α at q = ∞.
pub fn thm5_exponent(q: f64, alpha: f64) -> f64 {
    if q.is_infinite() {
        alpha
    } else {
        q * alpha / (q - 1.0)
    }
}

/// J(t) with 2^{2αJ} = c_* G^{qα/(q−1)}; −∞ when G = 0.
pub fn thm5_cutoff(grad_norm_q: f64, q: f64, alpha: f64, cstar: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("c_*", cstar)?;
    if !(q > 1.0) {
        return Err(Error::InvalidParameter(format!("q = {q} must lie in (1, ∞]")));
    }
    if !(grad_norm_q >= 0.0 && grad_norm_q.is_finite()) {
        return Err(Error::InvalidParameter(format!("gradient norm {grad_norm_q}")));
    }
    if grad_norm_q == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((cstar.log2() + thm5_exponent(q, alpha) * grad_norm_q.log2()) / (2.0 * alpha))
}

/// C(s, α) = (4C)^{(s−2+2α)/(2α)}·4C: the value that makes the proposition's
/// cutoff condition hold at γ = 1/2 for the Ḣ^s level ||θ(t)||_{Ḣ^s}.
pub fn thm3_constant(s: f64, alpha: f64, cprop: f64) -> Result<f64> {
    check_subcritical_range(s, alpha)?;
    positive("Cprop", cprop)?;
    Ok((4.0 * cprop).powf(1.0 / time_exponent(s, alpha)) * 4.0 * cprop)
}

/// J(t) with 2^{(2−s+2α)J} = C(s,α) h; −∞ when h = 0.
pub fn thm3_cutoff(h_norm: f64, s: f64, alpha: f64, c_s_alpha: f64) -> Result<f64> {
    check_subcritical_range(s, alpha)?;
    positive("C(s, alpha)", c_s_alpha)?;
    if !(h_norm >= 0.0 && h_norm.is_finite()) {
        return Err(Error::InvalidParameter(format!("h_norm = {h_norm}")));
    }
    if h_norm == 0.0 {
        return Ok(f64::NEG_INFINITY);
    }
    Ok((c_s_alpha * h_norm).log2() / (2.0 - s + 2.0 * alpha))
}

/// J(t) with 2^{2αJ} = prefactor/(T_max − t).
pub fn thm2_cutoff(time_to_blowup: f64, alpha: f64, prefactor: f64) -> Result<f64> {
    positive("alpha", alpha)?;
    positive("prefactor", prefactor)?;
    positive("T_max − t", time_to_blowup)?;
    Ok((prefactor.log2() - time_to_blowup.log2()) / (2.0 * alpha))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tmin_examples() {
        assert_eq!(ju_tmin(1.0, 1.6, 0.25, 1.0).unwrap(), 1.0);
        let t = ju_tmin(2.0, 1.6, 0.25, 1.0).unwrap();
        assert!((t - 2f64.powi(-5)).abs() < 1e-12);
        assert!(ju_tmin(1.0, 1.0, 0.25, 1.0).is_err());
        assert!(ju_tmin(10.0, 1.6, 0.25, 1.0).unwrap() > ju_tmin(20.0, 1.6, 0.25, 1.0).unwrap());
    }

    #[test]
    fn gamma_at_equality_is_one() {
        assert_eq!(gamma(0.3, 0.3, 1.6, 0.25).unwrap(), 1.0);
        assert!(gamma(0.3, 0.6, 1.6, 0.25).unwrap() < 1.0);
    }

    #[test]
    fn prop_examples() {
        let near_one = prop_quantities(1.0, 1.6, 0.25, 1.0 - 1e-15, 0.5).unwrap();
        assert!((near_one.t_check - 1.0).abs() < 1e-12);
        let a = prop_quantities(1.0, 1.6, 0.25, 0.5, 0.5).unwrap();
        let b = prop_quantities(2.0, 1.6, 0.25, 0.5, 0.5).unwrap();
        assert!((b.t_check / a.t_check - 2f64.powf(-5.0)).abs() < 1e-12);
        let c = prop_quantities(1.0, 1.6, 0.25, 0.25, 0.5).unwrap();
        assert!(c.j_min > a.j_min);
        assert!(prop_quantities(1.0, 1.6, 0.25, 1.0, 0.5).is_err());
    }

    #[test]
    fn thm5_examples() {
        for (q, a) in [(2.0, 0.25), (3.0, 0.4), (f64::INFINITY, 0.1)] {
            assert_eq!(thm5_cutoff(1.0, q, a, 1.0).unwrap(), 0.0);
        }
        assert!((thm5_cutoff(4.0, 2.0, 0.25, 1.0).unwrap() - 2.0).abs() < 1e-12);
        let q = 3.0;
        let d = thm5_cutoff(2.0, q, 0.3, 0.7).unwrap() - thm5_cutoff(1.0, q, 0.3, 0.7).unwrap();
        assert!((d - q / (2.0 * (q - 1.0))).abs() < 1e-12);
        assert_eq!(thm5_cutoff(0.0, 2.0, 0.25, 1.0).unwrap(), f64::NEG_INFINITY);
    }

    #[test]
    fn thm3_shift_by_one() {
        let (s, a) = (1.6, 0.25);
        let j1 = thm3_cutoff(0.7, s, a, 3.0).unwrap();
        let j2 = thm3_cutoff(0.7 * 2f64.powf(2.0 - s + 2.0 * a), s, a, 3.0).unwrap();
        assert!((j2 - j1 - 1.0).abs() < 1e-12);
    }
}
