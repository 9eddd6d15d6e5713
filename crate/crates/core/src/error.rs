//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("pole of {0}")]
    Pole(String),
    /// The Hankel determinant is indistinguishable from zero at the working precision.
    #[error("indeterminate at {prec} bits: {detail}")]
    Indeterminate { prec: u32, detail: String },
    #[error("no convergence after {iterations} iterations (worst residual {worst:e})")]
    NoConvergence { iterations: usize, worst: f64 },
    #[error("quadrature did not converge (error estimate {estimate:e}, target {target:e})")]
    Quadrature { estimate: f64, target: f64 },
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("empty set: {0}")]
    EmptySet(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
