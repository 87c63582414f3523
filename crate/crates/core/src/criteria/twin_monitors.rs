//! Uniqueness criteria evaluated on twin-run rows. Both monitors are pure
//! functions of the persisted rows.

use super::formulas::thm5_cutoff;
use super::report::{row, CriteriaReport, Status, TheoremId, Verdict};
use crate::error::{Error, Result};
use crate::evolution::{TwinRow, TwinSchedule};
use crate::littlewood_paley::{ratio_from_parts, Orientation};

fn check_rows(rows: &[TwinRow]) -> Result<()> {
    if rows.is_empty() {
        return Err(Error::InvalidParameter("twin record has no rows".into()));
    }
    if rows.iter().any(|r| r.values().iter().any(|v| v.is_nan())) {
        return Err(Error::InvalidParameter("twin rows contain NaN".into()));
    }
    Ok(())
}

/// Ratio of two band norms, NaN when both vanish.
fn band_ratio(low: f64, high: f64, orientation: Orientation) -> Result<f64> {
    if low == 0.0 && high == 0.0 {
        return Ok(f64::NAN);
    }
    ratio_from_parts(low, high, orientation)
}

/// Fixed-cutoff high/low L^p ratio of w = θ₁ − θ₂.
pub fn thm4_monitor(rows: &[TwinRow], schedule: &TwinSchedule) -> Result<CriteriaReport> {
    check_rows(rows)?;
    if rows.iter().all(|r| r.w_l2 == 0.0) {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm4, "w = 0 at every probe"));
    }
    let mut r = CriteriaReport::new(TheoremId::Thm4);
    r.input("j", schedule.thm4_j as f64)
        .input("q", schedule.thm4_q)
        .input("p", schedule.thm4_p());
    let mut sup: f64 = 0.0;
    for tr in rows {
        let ratio = band_ratio(tr.thm4_low, tr.thm4_high, Orientation::HighOverLow)?;
        if !ratio.is_nan() {
            sup = sup.max(ratio);
        }
        r.series.push(row(&[
            ("time", tr.time),
            ("w_l2", tr.w_l2),
            ("low", tr.thm4_low),
            ("high", tr.thm4_high),
            ("ratio", ratio),
        ]));
    }
    let max_w = rows.iter().map(|t| t.w_l2).fold(0.0, f64::max);
    r.quantity("sup_ratio", sup).quantity("max_w_l2", max_w);
    let bounded = sup.is_finite();
    r.quantity("contradiction_witness", if bounded { 1.0 } else { 0.0 });
    r.hypotheses.push(Verdict::holds_if("ratio-bounded", bounded, format!("sup high/low = {sup:e}")));
    r.conclusion = Some(Verdict::holds_if("w-vanishes", false, format!("max ||w||₂ = {max_w:e}")));
    Ok(r.finish())
}

/// Dynamic-cutoff low/high L^p ratio of w with J(t) recomputed from the
/// recorded ||∇θ₁||_q, plus an audit of d/dt||w||_p^p ≤ 0 on the intervals
/// whose left probe satisfies the ratio condition.
pub fn thm5_monitor(rows: &[TwinRow], schedule: &TwinSchedule, alpha: f64) -> Result<CriteriaReport> {
    check_rows(rows)?;
    let problems = schedule.problems();
    if !problems.is_empty() {
        return Err(Error::InvalidParameter(problems.join("; ")));
    }
    if rows.iter().all(|r| r.w_l2 == 0.0) {
        return Ok(CriteriaReport::vacuous(TheoremId::Thm5, "w = 0 at every probe"));
    }
    let cstar = schedule.cstar;
    let mut r = CriteriaReport::new(TheoremId::Thm5);
    r.input("p", schedule.thm5_p)
        .input("q", schedule.thm5_q)
        .input("alpha", alpha)
        .input("cstar", cstar);
    let mut ratios = Vec::with_capacity(rows.len());
    for tr in rows {
        let j = thm5_cutoff(tr.grad_q, schedule.thm5_q, alpha, cstar)?;
        if j != tr.thm5_j {
            return Err(Error::InvalidParameter(format!(
                "row at t = {} has J = {}, recomputed {j}",
                tr.time, tr.thm5_j
            )));
        }
        let ratio = band_ratio(tr.thm5_low, tr.thm5_high, Orientation::LowOverHigh)?;
        ratios.push(ratio);
        r.series.push(row(&[
            ("time", tr.time),
            ("j", j),
            ("grad_q", tr.grad_q),
            ("low", tr.thm5_low),
            ("high", tr.thm5_high),
            ("ratio", ratio),
            ("w_lp_pow", tr.w_lp_pow),
        ]));
    }
    let condition = |ratio: f64| ratio <= cstar;
    let crossing = rows
        .iter()
        .zip(&ratios)
        .find(|(_, q)| !q.is_nan() && !condition(**q))
        .map(|(t, _)| t.time);
    r.quantity("first_crossing", crossing.unwrap_or(f64::INFINITY));

    let (mut engaged, mut decreasing) = (0usize, 0usize);
    for k in 0..rows.len().saturating_sub(1) {
        if ratios[k].is_nan() || !condition(ratios[k]) {
            continue;
        }
        engaged += 1;
        if rows[k + 1].w_lp_pow <= rows[k].w_lp_pow {
            decreasing += 1;
        }
    }
    r.quantity("audit_intervals", engaged as f64)
        .quantity("audit_nonincreasing", decreasing as f64);

    let first = rows.iter().zip(&ratios).find(|(t, q)| t.time > 0.0 && !q.is_nan());
    let hyp = match first {
        None => Verdict::new("ratio-small-near-zero", Status::NotMeasured, "no probe with t > 0 and w ≠ 0"),
        Some((t, q)) => Verdict::holds_if(
            "ratio-small-near-zero",
            condition(*q),
            format!("ratio {q:e} at t = {} against c_* = {cstar}", t.time),
        ),
    };
    r.hypotheses.push(hyp);
    let max_w = rows.iter().map(|t| t.w_l2).fold(0.0, f64::max);
    r.quantity("max_w_l2", max_w);
    r.conclusion = Some(Verdict::holds_if("w-vanishes", false, format!("max ||w||₂ = {max_w:e}")));
    Ok(r.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::criteria::report::Outcome;

    fn schedule() -> TwinSchedule {
        TwinSchedule {
            every: 0.1,
            thm4_j: 2,
            thm4_q: 2.0,
            thm5_p: 2.0,
            thm5_q: 2.0,
            cstar: 1.0,
        }
    }

    fn tw(time: f64, w: f64, low: f64, high: f64, grad: f64) -> TwinRow {
        TwinRow {
            time,
            w_l2: w,
            thm4_low: low,
            thm4_high: high,
            w_lp: w,
            w_lp_pow: w * w,
            grad_q: grad,
            grad_inf: grad,
            thm5_j: thm5_cutoff(grad, 2.0, 0.25, 1.0).unwrap(),
            thm5_low: low,
            thm5_high: high,
        }
    }

    #[test]
    fn identical_twins_vacuous() {
        let rows = vec![tw(0.0, 0.0, 0.0, 0.0, 1.0), tw(0.1, 0.0, 0.0, 0.0, 1.0)];
        assert_eq!(thm4_monitor(&rows, &schedule()).unwrap().outcome, Outcome::Vacuous);
        assert_eq!(thm5_monitor(&rows, &schedule(), 0.25).unwrap().outcome, Outcome::Vacuous);
    }

    #[test]
    fn pure_high_perturbation_is_unbounded() {
        let rows = vec![tw(0.0, 1.0, 0.0, 1.0, 1.0), tw(0.1, 0.9, 0.1, 0.8, 1.0)];
        let r = thm4_monitor(&rows, &schedule()).unwrap();
        assert_eq!(r.get("sup_ratio").unwrap(), f64::INFINITY);
        assert_eq!(r.outcome, Outcome::Vacuous);
    }

    #[test]
    fn thm5_crossing_and_audit() {
        let rows = vec![
            tw(0.0, 1.0, 0.0, 1.0, 4.0),
            tw(0.1, 0.8, 0.2, 0.7, 4.0),
            tw(0.2, 0.9, 0.9, 0.3, 4.0),
        ];
        let r = thm5_monitor(&rows, &schedule(), 0.25).unwrap();
        assert_eq!(r.get("first_crossing").unwrap(), 0.2);
        assert_eq!(r.get("audit_intervals").unwrap(), 2.0);
        assert_eq!(r.get("audit_nonincreasing").unwrap(), 1.0);
        assert_eq!(r.hypothesis("ratio-small-near-zero").unwrap().status, Status::Holds);
        assert_eq!(r.outcome, Outcome::Fail);
        let mut bad = rows.clone();
        bad[1].thm5_j += 1.0;
        assert!(thm5_monitor(&bad, &schedule(), 0.25).is_err());
    }
}
