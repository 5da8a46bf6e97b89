use thiserror::Error;

/// Unified error type for the whole crate.
///
/// Construction sites attach enough context (dimensions, names, values) that a
/// message alone is actionable; callers that need to branch can match on the
/// variant.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("matrix is not unitary: max deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotUnitary { deviation: f64, tol: f64 },

    #[error("matrix is not symplectic: max deviation {deviation:.3e} exceeds {tol:.1e}")]
    NotSymplectic { deviation: f64, tol: f64 },

    #[error("covariance matrix invalid: {reason}")]
    InvalidCovariance { reason: String },

    #[error("symplectic eigenvalue {value} below 1 by more than tolerance {tol:.1e}")]
    EigenvalueBelowOne { value: f64, tol: f64 },

    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid graph: {reason}")]
    InvalidGraph { reason: String },

    #[error("invalid subsystem: {reason}")]
    InvalidSubsystem { reason: String },

    #[error("weight field not normalized: sum deviates from 1 by {deviation:.3e}")]
    NotNormalized { deviation: f64 },

    #[error("schedule error: {reason}")]
    Schedule { reason: String },

    #[error("numerical failure in {context}: {reason}")]
    Numerical { context: &'static str, reason: String },

    #[error("unsupported operation: {reason}")]
    Unsupported { reason: String },

    #[error("solver diverged at t = {t}: {reason}")]
    Diverged { t: f64, reason: String },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error at line {line}: {reason}")]
    Parse { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
