//! Error type shared across the crate.
//!
//! Budget caps are explicit and always surface as [`Error::BudgetExceeded`];
//! nothing in the crate silently truncates a scan.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter constraint was violated; the message names every failed
    /// constraint.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An enumeration or scan would exceed its explicit cap.
    #[error("budget exceeded: {what} requires {needed} but the cap is {cap}")]
    BudgetExceeded {
        what: &'static str,
        needed: String,
        cap: u64,
    },

    /// Rejection sampling exhausted its attempt budget.
    #[error("construction failed after {attempts} attempts: {reason}")]
    ConstructionFailed { attempts: u64, reason: String },

    /// The requested code is provably impossible before any sampling.
    #[error("construction infeasible: {0}")]
    ConstructionInfeasible(String),

    /// A Monte Carlo probe cannot produce a meaningful estimate with the
    /// supplied trial budget.
    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code the CLI maps this error to.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::BudgetExceeded { .. } => 2,
            Error::ConstructionFailed { .. } | Error::ConstructionInfeasible(_) => 3,
            _ => 1,
        }
    }
}
