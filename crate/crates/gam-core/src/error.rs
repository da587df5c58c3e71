//! Error type shared across the crate.

use thiserror::Error;

/// Errors produced by constellation construction, metric evaluation, and
/// optimization.
#[derive(Debug, Error)]
pub enum Error {
    /// Radii and probability vectors have different lengths.
    #[error("length mismatch: {radii} radii vs {probs} probabilities")]
    LengthMismatch { radii: usize, probs: usize },

    /// A constellation needs at least one point.
    #[error("constellation must contain at least one point")]
    Empty,

    /// A radius was negative.
    #[error("negative radius {value} at position {position}")]
    NegativeRadius { position: usize, value: f64 },

    /// Radii must be non-decreasing with list position.
    #[error("radii must be non-decreasing: r[{position}] < r[{}]", position - 1)]
    DecreasingRadii { position: usize },

    /// A probability was negative.
    #[error("negative probability {value} at position {position}")]
    NegativeProbability { position: usize, value: f64 },

    /// Probabilities summed to zero, so they cannot be normalized.
    #[error("probability vector sums to zero")]
    ZeroProbabilityMass,

    /// A value that must be finite was NaN or infinite.
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    /// Average power must be strictly positive.
    #[error("average power must be strictly positive")]
    ZeroPower,

    /// A scheme or operation precondition was violated.
    #[error("{0}")]
    InvalidParameter(String),

    /// A loaded or constructed constellation failed validation.
    #[error("constellation validation failed: {0}")]
    Validation(String),

    /// Grid refinement stopped before reaching the requested tolerance.
    #[error(
        "quadrature did not converge: last refinement changed by {achieved:.3e} \
         (tolerance {tol:.3e}); the tolerance is too tight for the refinement cap"
    )]
    QuadratureNotConverged { achieved: f64, tol: f64 },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Whether this error is a numerical failure (as opposed to a usage or
    /// precondition error). The CLI maps this distinction onto exit codes.
    pub fn is_numerical(&self) -> bool {
        matches!(self, Error::QuadratureNotConverged { .. })
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
