use thiserror::Error;

/// Errors raised by channel construction, Fock-space numerics and bound evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("channel is not completely positive: nu = {nu} < |tau - 1| = {required}")]
    NotCompletelyPositive { tau: f64, nu: f64, required: f64 },

    #[error("truncation budget exceeded: tail mass {tail:e} > budget {budget:e}")]
    Truncation { tail: f64, budget: f64 },

    #[error("support mismatch: input needs {needed} levels, kernel provides {available}")]
    SupportMismatch { needed: usize, available: usize },

    #[error("tail mass {tail:e} prevents bounding the entropy to {tolerance:e} bits")]
    TailTooLarge { tail: f64, tolerance: f64 },

    #[error("cutoff too small: trace defect {defect:e} exceeds budget {budget:e}")]
    CutoffTooSmall { defect: f64, budget: f64 },

    #[error("moment generating function does not decay (s_max = {0})")]
    NonDecayingMgf(f64),
}

impl Error {
    /// True for errors caused by a truncation or accuracy budget rather than invalid input.
    pub fn is_numeric_budget(&self) -> bool {
        matches!(
            self,
            Error::Truncation { .. }
                | Error::TailTooLarge { .. }
                | Error::CutoffTooSmall { .. }
                | Error::NonDecayingMgf(_)
        )
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
