use thiserror::Error;

/// Errors surfaced by the analytic layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// A model parameter violated its domain (negative rate, probability
    /// outside \[0,1\], ...).
    #[error("invalid parameter {name}: {value} ({requirement})")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        requirement: &'static str,
    },

    /// A first-passage computation cannot terminate: the increment law has
    /// no upward mass so the threshold is unreachable.
    #[error("first passage does not converge: {reason}")]
    NonConvergence { reason: String },

    /// A coefficient was requested beyond the truncation caps of a series.
    #[error("index {index:?} outside truncation caps {caps:?}")]
    IndexBeyondCaps {
        index: (usize, usize, usize),
        caps: (usize, usize, usize),
    },

    /// An optimization sweep was handed an empty candidate range.
    #[error("empty sweep range: {0}")]
    EmptySweep(String),
}

pub type Result<T> = std::result::Result<T, ModelError>;
