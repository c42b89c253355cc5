use thiserror::Error;

use crate::scalar::{fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration mismatch: {0}")]
    ConfigMismatch(String),
    #[error("axis {axis} out of range for n = {n}")]
    AxisOutOfRange { axis: usize, n: usize },
    #[error("missing assignment for {0}")]
    MissingAssignment(String),
    #[error("parse error at line {line}, column {col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("assumption failure: {0}")]
    Assumption(String),
    #[error("no root: {0}")]
    NoRoot(String),
    #[error("degenerate leading root: {0}")]
    DegenerateRoot(String),
    #[error("resonance at exponent {}: {msg}", fmt_q(.rho))]
    Resonance { rho: Q, msg: String },
    #[error("leading cancellation failed: {0}")]
    Cancellation(String),
    #[error("nonlinear term with non-positive valuation: {0}")]
    Valuation(String),
    #[error("dominant balance fails: {0}")]
    DominantBalance(String),
    #[error("resonance compatibility fails at exponent {}: {msg}", fmt_q(.rho))]
    Compatibility { rho: Q, msg: String },
    #[error("missing resonance data at exponent {}", fmt_q(.0))]
    MissingResonanceData(Q),
    #[error("truncation budget insufficient: {0}")]
    Truncation(String),
    #[error("residual certification failed: {0}")]
    Residual(String),
    #[error("no certificate: {0}")]
    Certificate(String),
    #[error("serialization: {0}")]
    Serialization(String),
    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
