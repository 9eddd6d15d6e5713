//! Arbitrary-precision arithmetic and special functions.
//!
//! Transcendental functions evaluate at `prec + GUARD_BITS` and round toward zero
//! to `prec` on return.

mod bessel;
mod complex;
mod gamma;
mod real;

pub use bessel::{bessel_j, bessel_jy, bessel_k, bessel_k_complex, bessel_y};
pub use complex::BigComplex;
pub use gamma::{bernoulli_b2k, gamma_fn, ln_gamma, recip_gamma};
pub use real::{BigReal, MIN_PREC};

/// Extra bits carried internally by every special function.
pub const GUARD_BITS: u32 = 32;

pub(crate) fn work_prec(prec: u32) -> u32 {
    prec.max(MIN_PREC) + GUARD_BITS
}
