use std::io;

use thiserror::Error;

/// Errors raised by the spectral, norm, evolution and criteria layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("size mismatch: expected {expected} samples, got {got}")]
    SizeMismatch { expected: usize, got: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ratio undefined: both low and high parts vanish")]
    UndefinedRatio,

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("integrator failure at t = {time} (step {step}); last good state at t = {last_good_time}")]
    Integrator {
        time: f64,
        step: usize,
        last_good_time: f64,
    },

    #[error("calibration failed: {0}")]
    Calibration(String),

    #[error("malformed checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
