use thiserror::Error;

pub use crate::model::{FormatError, ParamError, SequenceFileError};

/// Failures of the code's samplers, encoder and numeric helpers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum CodeError {
    #[error("argument {0} is outside the function's domain")]
    Domain(f64),
    #[error("no acceptable sequence after {attempts} attempts")]
    SamplerExhausted { attempts: u64 },
    #[error("the constrained codebook is empty")]
    EmptyCodebook,
    #[error("run of length {run} starting at position {position} exceeds the bound {max_run}")]
    RllViolation {
        position: usize,
        run: usize,
        max_run: usize,
    },
    #[error("expected {expected} bits, got {found}")]
    LengthMismatch { expected: usize, found: usize },
}
