//! Orthogonal polynomials for the Bessel weight `J_ν` on `[0, ∞)`, computed from
//! exact moments at arbitrary precision, together with their complex zeros,
//! Gaussian rules, and evaluators for the large-`n` asymptotic theory.

pub mod equilibrium;
pub mod error;
pub mod exec;
pub mod linalg;
pub mod moments;
pub mod mpfun;
pub mod parametrix;
pub mod quad;
pub mod quadrule;
pub mod smallnorm;
pub mod verify;
pub mod zeros;

pub use error::{Error, Result};
pub use exec::Exec;
pub use mpfun::{BigComplex, BigReal};
