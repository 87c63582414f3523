//! Spectral representation of periodic scalar fields and the SQG operators.

pub mod checkpoint;
mod fft;
mod field;
mod grid;
mod operators;
pub mod random;

pub use checkpoint::Checkpoint;
pub use field::{lp_norm_of_samples, SpectralField, VectorField, VelocityField, HERMITIAN_TOL};
pub use grid::{GridSpec, DEFAULT_DEALIAS};
pub use operators::{
    advection_term, fractional_laplacian, gradient, max_speed, rescale_solution, riesz_velocity,
};
pub(crate) use operators::{advection_unchecked, gradient_unchecked, transport_product};
