//! Evaluators for the frequency-sparseness regularity and uniqueness
//! criteria, with their universal constants as explicit parameters.

mod calibrate;
mod constants;
mod formulas;
mod monitors;
mod report;
mod twin_monitors;

pub use calibrate::{
    calibrate_c0, cprop_default, lambda_bern_default, C0Calibration, CalibrationSettings, MemberTiming,
};
pub use constants::{CalibrationConstants, Constant, Provenance};
pub use formulas::{
    check_subcritical_range, gamma, ju_tmin, prop_quantities, thm1_cutoff, thm2_cutoff, thm3_constant,
    thm3_cutoff, thm5_cutoff, thm5_exponent, time_exponent, PropQuantities,
};
pub use monitors::{estimate_tmax, prop_evaluate, thm1_evaluate, thm2_monitor, thm3_monitor};
pub use report::{CriteriaReport, Outcome, Real, SeriesRow, Status, TheoremId, Verdict};
pub use twin_monitors::{thm4_monitor, thm5_monitor};
