use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum JetError {
    /// An operation was applied outside the domain where it is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("linear part is ill-conditioned (condition number {cond:.3e} exceeds {limit:.0e})")]
    Conditioning { cond: f64, limit: f64 },

    #[error("length mismatch: expected {expected}, got {got}")]
    Length { expected: usize, got: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    /// The measured invariant count fell below the closed-form lower bound.
    #[error("invariant count {count} is below the lower bound {bound}")]
    BoundViolation { count: i64, bound: i64 },
}

pub type Result<T> = std::result::Result<T, JetError>;
