//! Crate-wide error type.

use thiserror::Error;

use crate::waves::WaveProfile;

#[derive(Debug, Error)]
pub enum Error {
    /// Construction or precondition failure: bad dimensions, non-positive
    /// parameters, malformed input files, and similar caller errors.
    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("dimension mismatch for {what}: expected {expected}, got {actual}")]
    Dimension {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A box column collapsed: the min and max intercepts coincide, so the
    /// box has empty interior in that coordinate.
    #[error("degenerate hypothesis box: species {index} has equal lower and upper levels")]
    DegenerateBox { index: usize },

    #[error("unsupported grid: {0}")]
    UnsupportedGrid(String),

    /// The branch formula was evaluated outside the domain where the
    /// square-root argument is nonnegative.
    #[error("negative discriminant at u = {u}")]
    NegativeDiscriminant { u: f64 },

    /// The square root in the slope formula vanished; the slope is not
    /// defined there.
    #[error("degenerate tangency: zero discriminant at u = {u}")]
    DegenerateTangency { u: f64 },

    /// The tangency quadratic produced no root that lies in (0, 1), keeps
    /// the branch positive, and satisfies the tangency equation.
    #[error("no admissible tangency root (candidates {candidates:?}, residuals {residuals:?})")]
    NoAdmissibleRoot {
        candidates: Vec<f64>,
        residuals: Vec<f64>,
    },

    #[error("linear solve failed: singular system at block {index}")]
    SingularSystem { index: usize },

    /// Newton failed to reach the residual tolerance. Carries the last
    /// iterate so callers can inspect or restart it.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        last: Box<WaveProfile>,
    },

    /// The iteration converged to a profile with a component below the
    /// admissible rounding slack; such profiles are rejected, not clamped.
    #[error("converged profile has negative component {min:.3e}")]
    NegativeProfile { min: f64, last: Box<WaveProfile> },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }
}
