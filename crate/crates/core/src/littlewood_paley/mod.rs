//! Dyadic frequency decomposition and the norms built on it.

mod checks;
mod filter;
mod norms;

pub use checks::{
    bernstein_check, bernstein_ratio, coherent_band_field, commutator_check, commutator_norms, fit_slope,
    interpolation_check, BernsteinReport, CommutatorReport, CommutatorShell, InterpolationReport,
    COMMUTATOR_TOLERANCE,
};
pub use filter::{chi, Band, FilterBank, ShellProjection};
pub use norms::{
    band_lp_pair, besov_norm, ratio_from_parts, shell_spectrum, sobolev_norm, sparseness_ratio,
    lp_ratio, BesovEntry, Entry, NormReport, NormRequest, Orientation, ShellSpectrum, Split,
    NEGLIGIBLE,
};
