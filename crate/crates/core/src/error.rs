use std::io;

use thiserror::Error;

/// Errors produced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("format error: {0}")]
    Format(String),
    #[error("field mean does not vanish: |mean| = {mean_norm:.3e}, |field| = {field_norm:.3e}")]
    MeanNotZero { mean_norm: f64, field_norm: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("states are not wave-cone connected: distance {distance:.3e} exceeds {tolerance:.1e}")]
    NotWaveCone { distance: f64, tolerance: f64 },
    #[error("empty slice at level {level} (range [{min}, {max}])")]
    EmptySlice { level: f64, min: f64, max: f64 },
    #[error("infeasible constitutive set: {0}")]
    Infeasible(String),
    #[error("witness violates derivative bound: measured {measured:.6e} > {bound:.6e}")]
    DerivativeBound { measured: f64, bound: f64 },
    #[error("witness is not supported inside the unit cell: boundary value {boundary:.3e}")]
    NotCompactlySupported { boundary: f64 },
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
