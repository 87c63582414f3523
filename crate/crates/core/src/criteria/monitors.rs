//! Criteria evaluated on initial data and single trajectories.

use super::constants::CalibrationConstants;
use super::formulas::{
    check_subcritical_range, gamma, ju_tmin, prop_quantities, thm1_cutoff, thm2_cutoff, thm3_constant,
    thm3_cutoff, time_exponent,
};
use super::report::{row, CriteriaReport, Status, TheoremId, Verdict};
use crate::error::{Error, Result};
use crate::evolution::TrajectoryRecord;
use crate::littlewood_paley::{besov_norm, sobolev_norm, sparseness_ratio, FilterBank};
use crate::spectral::SpectralField;

/// (time, ||θ(t)||_{Ḣ^s}) from a record, if it tracked index s.
fn hs_series(record: &TrajectoryRecord, s: f64) -> Option<Vec<(f64, f64)>> {
    if record.s == s {
        return Some(record.entries.iter().map(|e| (e.time, e.hs)).collect());
    }
    record
        .entries
        .iter()
        .map(|e| e.report.hs(s).map(|h| (e.time, h)))
        .collect()
}

fn sparseness_verdict(ratio: f64, threshold: f64) -> Verdict {
    Verdict::holds_if(
        "frequency-sparseness",
        ratio <= threshold,
        format!("low/high Ḣ^s ratio {ratio:e} against threshold {threshold:e}"),
    )
}

/// Regularity up to T_* under frequency sparseness of the data.
///
/// With a simulation, also records whether ||θ(t)||_{Ḣ^s} ≤ 2||θ₀||_{Ḣ^s}
/// held up to min(T_*, t_end).
pub fn thm1_evaluate(
    bank: &FilterBank,
    theta0: &SpectralField,
    s: f64,
    alpha: f64,
    t_star: f64,
    consts: &CalibrationConstants,
    sim: Option<&TrajectoryRecord>,
) -> Result<CriteriaReport> {
    check_subcritical_range(s, alpha)?;
    consts.validate()?;
    let h = sobolev_norm(theta0, s)?;
    if h == 0.0 {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm1, "zero data"));
    }
    let t_min = ju_tmin(h, s, alpha, consts.c0.value)?;
    if !(t_star > t_min) {
        return Err(Error::Hypothesis(format!(
            "T_* = {t_star} does not exceed T_min = {t_min}"
        )));
    }
    let g = gamma(t_min, t_star, s, alpha)?;
    let threshold = g / (4.0 * consts.cb.value);
    let j_real = thm1_cutoff(h, t_star, s, alpha, consts.cprop.value)?;
    let j = j_real.ceil();
    let ratio = sparseness_ratio(bank, theta0, j, s)?;

    let mut r = CriteriaReport::new(TheoremId::Thm1);
    r.input("s", s).input("alpha", alpha).input("t_star", t_star);
    r.quantity("h0", h)
        .quantity("t_min", t_min)
        .quantity("gamma", g)
        .quantity("threshold", threshold)
        .quantity("j_real", j_real)
        .quantity("j", j)
        .quantity("ratio", ratio);
    r.hypotheses.push(Verdict::new("t_star>t_min", Status::Holds, format!("{t_star} > {t_min}")));
    r.hypotheses.push(sparseness_verdict(ratio, threshold));
    r.conclusion = Some(match sim.and_then(|rec| hs_series(rec, s).map(|hs| (rec, hs))) {
        None => Verdict::new("norm-doubling-bound", Status::NotMeasured, "no simulation with this s"),
        Some((rec, hs)) => {
            let horizon = t_star.min(rec.final_time());
            r.quantity("horizon", horizon);
            let worst = hs
                .iter()
                .filter(|(t, _)| *t <= horizon)
                .map(|(_, v)| v / h)
                .fold(0.0, f64::max);
            r.quantity("max_growth", worst);
            if rec.failure.is_some() && rec.final_time() < t_star {
                Verdict::new("norm-doubling-bound", Status::Fails, "integrator failure before T_*")
            } else {
                Verdict::holds_if(
                    "norm-doubling-bound",
                    worst <= 2.0,
                    format!("max ||θ(t)||/||θ₀|| = {worst} on [0, {horizon}]"),
                )
            }
        }
    });
    Ok(r.finish())
}

/// Smallness at t_check under frequency sparseness at the proposition's J.
pub fn prop_evaluate(
    bank: &FilterBank,
    theta0: &SpectralField,
    s: f64,
    alpha: f64,
    gamma: f64,
    consts: &CalibrationConstants,
    sim: Option<&TrajectoryRecord>,
) -> Result<CriteriaReport> {
    consts.validate()?;
    let h = sobolev_norm(theta0, s)?;
    if h == 0.0 {
        return Ok(CriteriaReport::vacuous(TheoremId::Prop, "zero data"));
    }
    let pq = prop_quantities(h, s, alpha, gamma, consts.cprop.value)?;
    let threshold = gamma / (4.0 * consts.cb.value);
    let ratio = sparseness_ratio(bank, theta0, pq.j as f64, s)?;
    let mut r = CriteriaReport::new(TheoremId::Prop);
    r.input("s", s).input("alpha", alpha).input("gamma", gamma);
    r.quantity("h0", h)
        .quantity("t_check", pq.t_check)
        .quantity("j_min", pq.j_min)
        .quantity("j", pq.j as f64)
        .quantity("threshold", threshold)
        .quantity("ratio", ratio);
    let t_min = ju_tmin(h, s, alpha, consts.c0.value)?;
    r.quantity("t_min", t_min);
    r.hypotheses.push(sparseness_verdict(ratio, threshold));
    let measured = sim.and_then(|rec| {
        let hs = hs_series(rec, s)?;
        let tol = 1e-9 * pq.t_check.max(1.0);
        hs.into_iter().find(|(t, _)| (t - pq.t_check).abs() <= tol)
    });
    r.conclusion = Some(match measured {
        None => Verdict::new("smallness", Status::NotMeasured, "no Ḣ^s probe at t_check"),
        Some((_, ht)) => {
            r.quantity("h_check", ht).quantity("h_check_over_h0", ht / h);
            Verdict::holds_if(
                "smallness",
                ht <= gamma * h,
                format!("||θ(t_check)|| = {ht:e}, γ||θ₀|| = {:e}", gamma * h),
            )
        }
    });
    Ok(r.finish())
}

/// T_max from an affine fit of ||θ||^{−2α/(s−2+2α)} against t over the last
/// quartile of (t, h) samples; `None` when the fit does not decrease.
pub fn estimate_tmax(samples: &[(f64, f64)], s: f64, alpha: f64) -> Option<f64> {
    let e = time_exponent(s, alpha);
    let n = samples.len();
    if n < 2 {
        return None;
    }
    let start = (3 * n / 4).min(n - 2);
    let pts: Vec<(f64, f64)> = samples[start..]
        .iter()
        .filter(|(_, h)| *h > 0.0)
        .map(|(t, h)| (*t, h.powf(-e)))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1).collect();
    let slope = crate::littlewood_paley::fit_slope(&xs, &ys);
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let my = ys.iter().sum::<f64>() / ys.len() as f64;
    if !(slope < 0.0) {
        return None;
    }
    Some(mx - my / slope)
}

fn fields_for(record: &TrajectoryRecord) -> Result<Vec<&(f64, SpectralField)>> {
    if record.fields.is_empty() {
        return Err(Error::InvalidParameter(
            "trajectory carries no fields; load its checkpoints first".into(),
        ));
    }
    Ok(record.fields.iter().collect())
}

/// Type-1 sandwich and lower bound on the low/high ratio near a blow-up
/// candidate. `c_star_upper` is the Type-1 upper constant; the cutoff uses
/// 2^{2αJ} = prefactor/(T_max − t).
pub fn thm2_monitor(
    record: &TrajectoryRecord,
    s: f64,
    alpha: f64,
    c_star_upper: f64,
    prefactor: f64,
    consts: &CalibrationConstants,
) -> Result<CriteriaReport> {
    check_subcritical_range(s, alpha)?;
    consts.validate()?;
    let Some(flag) = record.blowup else {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm2, "no blow-up flag"));
    };
    let bank = FilterBank::new(record.grid);
    let window: Vec<&(f64, SpectralField)> = fields_for(record)?
        .into_iter()
        .filter(|(t, _)| *t <= flag.time)
        .collect();
    let samples = window
        .iter()
        .map(|(t, f)| Ok((*t, sobolev_norm(f, s)?)))
        .collect::<Result<Vec<_>>>()?;
    let Some(t_max) = estimate_tmax(&samples, s, alpha) else {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm2, "no finite T_max from the fit"));
    };
    let mut r = CriteriaReport::new(TheoremId::Thm2);
    r.input("s", s).input("alpha", alpha).input("c_star_upper", c_star_upper).input("prefactor", prefactor);
    r.quantity("t_max", t_max).quantity("flag_time", flag.time);
    let power = 1.0 / time_exponent(s, alpha);
    let c0 = consts.c0.value;
    let mut sandwich = true;
    let mut inf_ratio = f64::INFINITY;
    for ((t, field), (_, h)) in window.iter().zip(&samples) {
        let gap = t_max - t;
        if gap <= 0.0 {
            continue;
        }
        let lower = (c0 / gap).powf(power);
        let upper = (c_star_upper / gap).powf(power);
        let slack = 1e-9 * h.max(lower);
        let inside = *h >= lower - slack && *h <= upper + slack;
        sandwich &= inside;
        let j = thm2_cutoff(gap, alpha, prefactor)?;
        let ratio = sparseness_ratio(&bank, field, j, s)?;
        inf_ratio = inf_ratio.min(ratio);
        r.series.push(row(&[
            ("time", *t),
            ("hs", *h),
            ("lower", lower),
            ("upper", upper),
            ("j", j),
            ("ratio", ratio),
        ]));
    }
    r.quantity("inf_ratio", inf_ratio);
    r.hypotheses.push(Verdict::holds_if("blow-up-candidate", true, format!("{:?}", flag.reason)));
    r.hypotheses.push(Verdict::holds_if(
        "type-1-sandwich",
        sandwich,
        format!("C0 = {c0}, C_* = {c_star_upper}"),
    ));
    let cstar = consts.cstar.value;
    r.conclusion = Some(Verdict::holds_if(
        "ratio-lower-bound",
        inf_ratio > cstar,
        format!("inf ratio {inf_ratio:e} against c_* = {cstar}"),
    ));
    Ok(r.finish())
}

/// Running sup of ||Δ_{<J(t)}θ||_{Ḃ^{2−2α}_{2,∞}} with
/// 2^{(2−s+2α)J(t)} = C(s,α)||θ(t)||_{Ḣ^s}, compared to ε_*.
pub fn thm3_monitor(record: &TrajectoryRecord, s: f64, alpha: f64, consts: &CalibrationConstants) -> Result<CriteriaReport> {
    check_subcritical_range(s, alpha)?;
    consts.validate()?;
    let bank = FilterBank::new(record.grid);
    let c = thm3_constant(s, alpha, consts.cprop.value)?;
    let mut r = CriteriaReport::new(TheoremId::Thm3);
    r.input("s", s).input("alpha", alpha);
    r.quantity("c_s_alpha", c).quantity("eps_star", consts.eps_star.value);
    let mut running: f64 = 0.0;
    let mut engaged = false;
    for (t, field) in fields_for(record)? {
        let h = sobolev_norm(field, s)?;
        let j = thm3_cutoff(h, s, alpha, c)?;
        engaged |= h > 0.0;
        let low = besov_norm(&bank, &bank.project_below(field, j), 2.0 - 2.0 * alpha, 2.0)?;
        running = running.max(low);
        r.series.push(row(&[("time", *t), ("hs", h), ("j", j), ("besov_low", low), ("running_sup", running)]));
    }
    if !engaged {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm3, "zero field"));
    }
    r.quantity("sup_besov_low", running);
    let eps = consts.eps_star.value;
    r.hypotheses.push(Verdict::holds_if(
        "low-frequency-besov-small",
        running <= eps,
        format!("sup {running:e} against ε_* = {eps}"),
    ));
    r.conclusion = Some(match record.blowup {
        None => Verdict::holds_if("no-blow-up", true, "run completed without a blow-up flag"),
        Some(flag) => Verdict::holds_if("no-blow-up", false, format!("flagged at t = {}", flag.time)),
    });
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::evolution::{evolve, DtPolicy, Mode, ProbeSchedule, StepperConfig};
    use crate::spectral::GridSpec;
    use num_complex::Complex64;

    fn single_shell(g: GridSpec, k: i64) -> SpectralField {
        let mut f = SpectralField::zeros(g);
        f.set_mode(k, 0, Complex64::new(0.5, 0.0));
        f.set_mode(0, k, Complex64::new(0.5, 0.0));
        f
    }

    #[test]
    fn thm1_high_and_low_data() {
        let g = GridSpec::periodic(64).unwrap();
        let bank = FilterBank::new(g);
        let consts = CalibrationConstants::default();
        let (s, a) = (1.6, 0.25);
        // tiny data keeps T_min small so T_* = 2 T_min, J lands mid-grid
        let high = single_shell(g, 16).scaled(1e-3);
        let h = sobolev_norm(&high, s).unwrap();
        let t_star = 2.0 * ju_tmin(h, s, a, 1.0).unwrap();
        let r = thm1_evaluate(&bank, &high, s, a, t_star, &consts, None).unwrap();
        let j = r.get("j").unwrap();
        if j <= 4.0 {
            assert_eq!(r.get("ratio").unwrap(), 0.0);
            assert_eq!(r.hypothesis("frequency-sparseness").unwrap().status, Status::Holds);
        }
        let low = single_shell(g, 1).scaled(1e-3);
        let hl = sobolev_norm(&low, s).unwrap();
        let t_star = 2.0 * ju_tmin(hl, s, a, 1.0).unwrap();
        let r = thm1_evaluate(&bank, &low, s, a, t_star, &consts, None).unwrap();
        if r.get("j").unwrap() >= 2.0 {
            assert_eq!(r.get("ratio").unwrap(), f64::INFINITY);
            assert_eq!(r.hypothesis("frequency-sparseness").unwrap().status, Status::Fails);
        }
        let t_min = ju_tmin(hl, s, a, 1.0).unwrap();
        assert!(thm1_evaluate(&bank, &low, s, a, t_min, &consts, None).is_err());
    }

    #[test]
    fn tmax_fit_recovers_exact_type1() {
        let (s, a) = (1.6, 0.25);
        let power = 1.0 / time_exponent(s, a);
        let samples: Vec<(f64, f64)> = (0..40).map(|k| {
            let t = k as f64 * 0.02;
            (t, (1.0 / (1.0 - t)).powf(power))
        }).collect();
        let t_max = estimate_tmax(&samples, s, a).unwrap();
        assert!((t_max - 1.0).abs() < 1e-10);
        let decaying: Vec<(f64, f64)> = (0..10).map(|k| (k as f64, 1.0 / (1.0 + k as f64))).collect();
        assert!(estimate_tmax(&decaying, s, a).is_none());
    }

    #[test]
    fn thm2_vacuous_for_decaying_run() {
        let g = GridSpec::periodic(32).unwrap();
        let cfg = StepperConfig::new(0.25, DtPolicy::Fixed { dt: 0.05 }, 0.5).with_mode(Mode::LinearHeat);
        let rec = evolve(&single_shell(g, 2), &cfg, &ProbeSchedule::every(0.1).keeping_fields()).unwrap();
        let r = thm2_monitor(&rec, 1.6, 0.25, 1.0, 1.0, &CalibrationConstants::default()).unwrap();
        assert_eq!(r.outcome, super::super::report::Outcome::Vacuous);
    }

    #[test]
    fn thm3_zero_field_vacuous_and_single_shell_captures_nothing() {
        let g = GridSpec::periodic(64).unwrap();
        let cfg = StepperConfig::new(0.25, DtPolicy::Fixed { dt: 0.05 }, 0.1).with_mode(Mode::LinearHeat);
        let schedule = ProbeSchedule::every(0.05).keeping_fields();
        let consts = CalibrationConstants::default();
        let rec = evolve(&SpectralField::zeros(g), &cfg, &schedule).unwrap();
        assert_eq!(thm3_monitor(&rec, 1.6, 0.25, &consts).unwrap().outcome, super::super::report::Outcome::Vacuous);
        // small amplitude pushes J(t) below the field's shell
        let rec = evolve(&single_shell(g, 16).scaled(1e-6), &cfg, &schedule).unwrap();
        let r = thm3_monitor(&rec, 1.6, 0.25, &consts).unwrap();
        assert_eq!(r.get("sup_besov_low").unwrap(), 0.0);
    }
}
