use alloc::string::String;
use alloc::vec::Vec;

/// Errors raised by validation, assembly and numerical routines.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A parameter record violates its invariants.
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParam {
        /// Offending field.
        field: &'static str,
        /// Human readable reason.
        reason: String,
    },
    /// Zero resistance where a finite time constant is required.
    #[error("lossless component `{0}`: time constant undefined")]
    Lossless(String),
    /// Topology validation failed; every problem found is listed.
    #[error("invalid topology: {}", .0.join("; "))]
    Topology(Vec<String>),
    /// Slice lengths do not match the component layout.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension {
        /// Expected length.
        expected: usize,
        /// Supplied length.
        got: usize,
    },
    /// A matrix that must be symmetric is not.
    #[error("matrix is not symmetric")]
    Asymmetric,
    /// E = D = 0 with no nominal fallback available.
    #[error("time constant indeterminate (zero energy and zero dissipation)")]
    Indeterminate,
    /// Too few samples for a finite-difference stencil.
    #[error("window of {0} samples is too short")]
    ShortWindow(usize),
    /// Newton iteration did not converge.
    #[error("equilibrium solve did not converge (residual {0:e})")]
    NoConvergence(f64),
    /// Linear system is singular.
    #[error("singular linear system")]
    Singular,
    /// Integration produced non-finite or runaway states.
    #[error("run diverged at t = {0}")]
    Diverged(f64),
    /// Misc. invalid argument.
    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn param(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            field,
            reason: reason.into(),
        }
    }
}
