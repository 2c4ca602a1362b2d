//! Error type shared by every module of the crate.

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Caller supplied malformed input (wrong dimension, out-of-domain point, ...).
    #[error("invalid input: {0}")]
    Input(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// Newton's method for the Laplace mode did not reach the gradient tolerance.
    #[error(
        "laplace fit did not converge after {iterations} iterations (gradient max-norm {gradient_norm:.3e})"
    )]
    FitNonConvergence { iterations: usize, gradient_norm: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Operation not allowed in the current state machine state.
    #[error("invalid state: {0}")]
    State(String),

    /// A point was re-reported with a satisfaction that contradicts the ledger.
    #[error("inconsistent feedback: {0}")]
    Consistency(String),

    /// No feasible point is available where at least one is required.
    #[error("assumption violated: the initial comparison must contain at least one non-crashed point ({0})")]
    NoFeasiblePoint(String),

    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u32, expected: u32 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

pub(crate) fn check_unit_point(x: &[f64]) -> Result<()> {
    if let Some(v) = x.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::input(format!("coordinate {v} lies outside the unit domain [0, 1]")));
    }
    Ok(())
}
