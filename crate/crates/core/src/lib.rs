//! Pseudo-spectral solver for the dissipative surface quasi-geostrophic
//! equation on a periodic box,
//!
//! ```text
//! ∂ₜθ + u·∇θ + (−Δ)^α θ = 0,    u = (−R₂θ, R₁θ),
//! ```
//!
//! together with a Littlewood-Paley norm engine and evaluators for
//! frequency-sparseness regularity and uniqueness criteria.

pub mod criteria;
pub mod error;
pub mod evolution;
pub mod littlewood_paley;
pub mod spectral;

pub use error::{Error, Result};
