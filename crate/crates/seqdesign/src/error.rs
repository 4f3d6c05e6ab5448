//! Error type shared across the crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A configuration value is out of its documented range.
    Config(String),
    /// Exhaustive search refused: the instance has more than `cap` variables.
    OracleCapExceeded { bits: usize, cap: usize },
    /// The ℓp-sphere projection of the zero matrix is undefined.
    SingularProjection,
    /// LFSR taps do not generate a maximal-length sequence.
    NonPrimitiveTaps { degree: u32, taps: u32, period: u64 },
    /// Solver state went non-finite; the run is aborted.
    Divergence { iteration: usize },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "invalid configuration: {msg}"),
            Error::OracleCapExceeded { bits, cap } => {
                write!(f, "exhaustive search refused: {bits} variables exceeds cap {cap}")
            }
            Error::SingularProjection => {
                write!(f, "lp-sphere projection undefined for the zero matrix")
            }
            Error::NonPrimitiveTaps { degree, taps, period } => write!(
                f,
                "taps {taps:#b} of degree {degree} give period {period}, not 2^{degree}-1"
            ),
            Error::Divergence { iteration } => {
                write!(f, "solver diverged: non-finite state at iteration {iteration}")
            }
        }
    }
}

impl std::error::Error for Error {}
