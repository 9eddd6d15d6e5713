//! Precision-carrying real scalar backed by an MPFR float.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::{Constant, Round};
use rug::ops::Pow;
use rug::Float;

/// Smallest working precision accepted anywhere in the crate.
pub const MIN_PREC: u32 = 64;

fn clamp_prec(prec: u32) -> u32 {
    prec.max(MIN_PREC)
}

/// An arbitrary-precision real number that remembers its working precision.
///
/// Binary arithmetic rounds to the larger of the two operand precisions.
#[derive(Clone, PartialEq, PartialOrd)]
pub struct BigReal(Float);

macro_rules! unary_fn {
    ($($name:ident),* $(,)?) => {
        $(
            pub fn $name(&self) -> BigReal {
                BigReal(self.0.clone().$name())
            }
        )*
    };
}

impl BigReal {
    pub fn zero(prec: u32) -> Self {
        BigReal(Float::new(clamp_prec(prec)))
    }

    pub fn one(prec: u32) -> Self {
        Self::from_i64(1, prec)
    }

    pub fn from_f64(x: f64, prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), x))
    }

    pub fn from_i64(x: i64, prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), x))
    }

    /// `num / den`, correctly rounded.
    pub fn from_ratio(num: i64, den: i64, prec: u32) -> Self {
        let p = clamp_prec(prec);
        BigReal(Float::with_val(p, num) / Float::with_val(p, den))
    }

    /// Parses a decimal literal such as `"0.25"` or `"1e-6"` at the given precision.
    pub fn parse(s: &str, prec: u32) -> Option<Self> {
        let parsed = Float::parse(s.trim()).ok()?;
        Some(BigReal(Float::with_val(clamp_prec(prec), parsed)))
    }

    pub fn from_float(f: Float) -> Self {
        if f.prec() < MIN_PREC {
            BigReal(Float::with_val(MIN_PREC, f))
        } else {
            BigReal(f)
        }
    }

    pub fn pi(prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), Constant::Pi))
    }

    pub fn ln2(prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), Constant::Log2))
    }

    pub fn euler_gamma(prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), Constant::Euler))
    }

    /// `2^e` exactly.
    pub fn exp2i(e: i32, prec: u32) -> Self {
        let mut f = Float::with_val(clamp_prec(prec), 1);
        f <<= e;
        BigReal(f)
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn prec(&self) -> u32 {
        self.0.prec()
    }

    /// Returns a copy rounded (to nearest) to `prec` bits.
    pub fn with_prec(&self, prec: u32) -> Self {
        BigReal(Float::with_val(clamp_prec(prec), &self.0))
    }

    /// Rounds toward zero to `prec` bits.
    pub fn round_down(&self, prec: u32) -> Self {
        let (f, _) = Float::with_val_round(clamp_prec(prec), &self.0, Round::Zero);
        BigReal(f)
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.0.is_finite()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn is_sign_negative(&self) -> bool {
        self.0.is_sign_negative()
    }

    pub fn is_sign_positive(&self) -> bool {
        self.0.is_sign_positive()
    }

    /// Sign as -1, 0 or 1.
    pub fn signum_i(&self) -> i32 {
        match self.0.cmp0() {
            Some(Ordering::Less) => -1,
            Some(Ordering::Greater) => 1,
            _ => 0,
        }
    }

    /// Binary exponent `e` with `|x| = m * 2^e`, `0.5 <= m < 1`; `None` for zero.
    pub fn exponent(&self) -> Option<i32> {
        self.0.get_exp()
    }

    /// Approximate base-2 logarithm of `|x|`, `-inf` for zero.
    pub fn log2_abs(&self) -> f64 {
        if self.0.is_zero() {
            return f64::NEG_INFINITY;
        }
        let (m, e) = self.0.to_f64_exp();
        m.abs().log2() + e as f64
    }

    unary_fn!(
        abs, sqrt, exp, ln, sin, cos, tan, sinh, cosh, tanh, asin, acos, atan, asinh, acosh,
        atanh, floor, ceil, round, trunc, recip, square, ln_1p, exp_m1, log2,
    );

    pub fn atan2(&self, x: &BigReal) -> BigReal {
        let p = self.prec().max(x.prec());
        BigReal(Float::with_val(p, self.0.atan2_ref(&x.0)))
    }

    pub fn hypot(&self, other: &BigReal) -> BigReal {
        let p = self.prec().max(other.prec());
        BigReal(Float::with_val(p, self.0.hypot_ref(&other.0)))
    }

    pub fn powi(&self, k: i32) -> BigReal {
        BigReal(Float::with_val(self.prec(), (&self.0).pow(k)))
    }

    pub fn powf(&self, e: &BigReal) -> BigReal {
        let p = self.prec().max(e.prec());
        BigReal(Float::with_val(p, (&self.0).pow(&e.0)))
    }

    /// Multiplies by `2^k` exactly.
    pub fn mul_pow2(&self, k: i32) -> BigReal {
        let mut f = self.0.clone();
        f <<= k;
        BigReal(f)
    }

    pub fn mul_i64(&self, k: i64) -> BigReal {
        BigReal(Float::with_val(self.prec(), &self.0 * k))
    }

    pub fn div_i64(&self, k: i64) -> BigReal {
        BigReal(Float::with_val(self.prec(), &self.0 / k))
    }

    pub fn add_f64(&self, k: f64) -> BigReal {
        BigReal(Float::with_val(self.prec(), &self.0 + k))
    }

    pub fn mul_f64(&self, k: f64) -> BigReal {
        BigReal(Float::with_val(self.prec(), &self.0 * k))
    }

    pub fn max_ref<'a>(&'a self, other: &'a BigReal) -> &'a BigReal {
        if self >= other {
            self
        } else {
            other
        }
    }

    /// Decimal scientific notation with `digits` significant digits.
    pub fn to_decimal(&self, digits: usize) -> String {
        if self.0.is_zero() {
            return if self.0.is_sign_negative() {
                "-0".into()
            } else {
                "0".into()
            };
        }
        self.0.to_string_radix(10, Some(digits.max(1)))
    }

    /// Number of decimal digits that losslessly represents `prec` bits.
    pub fn full_digits(prec: u32) -> usize {
        (f64::from(prec) * std::f64::consts::LOG10_2).ceil() as usize + 2
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_decimal(20))
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match f.precision() {
            Some(d) => write!(f, "{}", self.to_decimal(d)),
            None => write!(f, "{}", self.to_decimal(Self::full_digits(self.prec()))),
        }
    }
}

impl PartialEq<f64> for BigReal {
    fn eq(&self, other: &f64) -> bool {
        self.0 == *other
    }
}

impl PartialOrd<f64> for BigReal {
    fn partial_cmp(&self, other: &f64) -> Option<Ordering> {
        self.0.partial_cmp(other)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let p = self.prec().max(rhs.prec());
                BigReal(Float::with_val(p, (&self.0).$method(&rhs.0)))
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
        impl $trait<f64> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: f64) -> BigReal {
                BigReal(Float::with_val(self.prec(), (&self.0).$method(rhs)))
            }
        }
        impl $trait<f64> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: f64) -> BigReal {
                (&self).$method(rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(-self.0)
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal(Float::with_val(self.prec(), -&self.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_takes_max_precision() {
        let a = BigReal::from_i64(3, 80);
        let b = BigReal::from_i64(7, 200);
        assert_eq!((&a + &b).prec(), 200);
        assert_eq!((&b * &a).prec(), 200);
        assert_eq!((&a / &b).prec(), 200);
    }

    #[test]
    fn precision_floor_is_enforced() {
        assert_eq!(BigReal::from_f64(1.5, 8).prec(), MIN_PREC);
        assert_eq!(BigReal::zero(0).prec(), MIN_PREC);
    }

    #[test]
    fn parse_and_print() {
        let x = BigReal::parse("0.25", 128).unwrap();
        assert_eq!(x, 0.25);
        assert!(BigReal::parse("nope", 128).is_none());
        assert_eq!(BigReal::full_digits(512), 157);
    }

    #[test]
    fn round_down_truncates() {
        let third = BigReal::from_ratio(1, 3, 256);
        let r = third.round_down(64);
        assert!(r <= BigReal::from_ratio(1, 3, 256));
        assert_eq!(r.prec(), 64);
    }
}
