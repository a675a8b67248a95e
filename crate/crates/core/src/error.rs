use thiserror::Error;

use crate::dsl::ParseError;

/// Errors raised by the sequence, expansion, verification and conjecture layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("index {0} is negative")]
    NegativeIndex(i64),

    #[error("invalid sequence spec: {0}")]
    InvalidSpec(String),

    #[error("cannot step {name} backward to index {index}: trailing coefficient {trailing} is not a unit (enable rational mode)")]
    NonInvertibleStep {
        name: String,
        index: i64,
        trailing: String,
    },

    #[error("value of {name} at index {index} is not an integer")]
    NonIntegral { name: String, index: i64 },

    #[error("linear form is empty")]
    EmptyForm,

    #[error("expansion depth must be at least 1, got {0}")]
    InvalidDepth(usize),

    #[error("target index must be at least {min}, got {got}")]
    IndexTooSmall { min: i64, got: i64 },

    #[error("invalid range {lo}..{hi}")]
    InvalidRange { lo: i64, hi: i64 },

    #[error("need at least {needed} values, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("conjecture has no determined weight or residual sequence")]
    Undetermined,

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
