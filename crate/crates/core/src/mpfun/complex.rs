//! Complex numbers over [`BigReal`] with principal-branch elementary functions.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use super::BigReal;

#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: BigReal,
    pub im: BigReal,
}

impl BigComplex {
    pub fn new(re: BigReal, im: BigReal) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::zero(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigComplex::new(BigReal::one(prec), BigReal::zero(prec))
    }

    pub fn i(prec: u32) -> Self {
        BigComplex::new(BigReal::zero(prec), BigReal::one(prec))
    }

    pub fn from_real(re: BigReal) -> Self {
        let p = re.prec();
        BigComplex::new(re, BigReal::zero(p))
    }

    pub fn from_f64(re: f64, im: f64, prec: u32) -> Self {
        BigComplex::new(BigReal::from_f64(re, prec), BigReal::from_f64(im, prec))
    }

    /// `r * e^{i theta}`.
    pub fn from_polar(r: &BigReal, theta: &BigReal) -> Self {
        BigComplex::new(r * theta.cos(), r * theta.sin())
    }

    /// `e^{i theta}`.
    pub fn cis(theta: &BigReal) -> Self {
        BigComplex::new(theta.cos(), theta.sin())
    }

    pub fn prec(&self) -> u32 {
        self.re.prec().max(self.im.prec())
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex::new(self.re.with_prec(prec), self.im.with_prec(prec))
    }

    pub fn to_c64(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn conj(&self) -> Self {
        BigComplex::new(self.re.clone(), -&self.im)
    }

    pub fn norm_sqr(&self) -> BigReal {
        self.re.square() + self.im.square()
    }

    pub fn abs(&self) -> BigReal {
        self.re.hypot(&self.im)
    }

    /// Principal argument in `(-pi, pi]`.
    pub fn arg(&self) -> BigReal {
        self.im.atan2(&self.re)
    }

    pub fn scale(&self, k: &BigReal) -> Self {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    pub fn scale_f64(&self, k: f64) -> Self {
        BigComplex::new(&self.re * k, &self.im * k)
    }

    pub fn mul_pow2(&self, k: i32) -> Self {
        BigComplex::new(self.re.mul_pow2(k), self.im.mul_pow2(k))
    }

    /// Multiplies by `i`.
    pub fn mul_i(&self) -> Self {
        BigComplex::new(-&self.im, self.re.clone())
    }

    pub fn add_real(&self, x: &BigReal) -> Self {
        BigComplex::new(&self.re + x, self.im.clone())
    }

    pub fn recip(&self) -> Self {
        let d = self.norm_sqr();
        BigComplex::new(&self.re / &d, -(&self.im / &d))
    }

    pub fn square(&self) -> Self {
        self * self
    }

    pub fn exp(&self) -> Self {
        let m = self.re.exp();
        BigComplex::new(&m * self.im.cos(), &m * self.im.sin())
    }

    /// Principal logarithm, imaginary part in `(-pi, pi]`.
    pub fn ln(&self) -> Self {
        BigComplex::new(self.abs().ln(), self.arg())
    }

    /// Principal square root, `Re >= 0`, cut along the negative real axis.
    pub fn sqrt(&self) -> Self {
        let p = self.prec();
        if self.is_zero() {
            return BigComplex::zero(p);
        }
        let r = self.abs();
        if self.re.is_sign_positive() && !self.re.is_zero() || self.re.is_zero() {
            let t = ((&r + &self.re).mul_pow2(-1)).sqrt();
            let u = if t.is_zero() {
                BigReal::zero(p)
            } else {
                (&self.im / &t).mul_pow2(-1)
            };
            BigComplex::new(t, u)
        } else {
            // Re < 0: compute |Im of root| first to avoid cancellation.
            let u = ((&r - &self.re).mul_pow2(-1)).sqrt();
            let t = (self.im.abs() / &u).mul_pow2(-1);
            let u = if self.im.is_sign_negative() { -u } else { u };
            BigComplex::new(t, u)
        }
    }

    /// Principal power `exp(a * log z)`; `0^a = 0` for `Re a > 0`.
    pub fn powc(&self, a: &BigComplex) -> Self {
        if self.is_zero() {
            return BigComplex::zero(self.prec().max(a.prec()));
        }
        (a * self.ln()).exp()
    }

    /// Principal power with a real exponent.
    pub fn powf(&self, a: &BigReal) -> Self {
        if self.is_zero() {
            return BigComplex::zero(self.prec().max(a.prec()));
        }
        let l = self.ln();
        let m = (&l.re * a).exp();
        let t = &l.im * a;
        BigComplex::from_polar(&m, &t)
    }

    /// Integer power by repeated squaring.
    pub fn powi(&self, k: i64) -> Self {
        let p = self.prec();
        if k < 0 {
            return self.powi(-k).recip();
        }
        let mut base = self.clone();
        let mut acc = BigComplex::one(p);
        let mut e = k as u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = base.square();
            }
        }
        acc
    }

    pub fn sin(&self) -> Self {
        BigComplex::new(
            self.re.sin() * self.im.cosh(),
            self.re.cos() * self.im.sinh(),
        )
    }

    pub fn cos(&self) -> Self {
        BigComplex::new(
            self.re.cos() * self.im.cosh(),
            -(self.re.sin() * self.im.sinh()),
        )
    }

    /// Principal `arccos`, via `-i log(z + i sqrt(1 - z^2))`.
    pub fn acos(&self) -> Self {
        let p = self.prec();
        let one = BigComplex::one(p);
        // sqrt(1-z)sqrt(1+z) keeps the standard cuts (-inf,-1] and [1,inf).
        let s = (&one - self).sqrt() * (&one + self).sqrt();
        let w = (self + s.mul_i()).ln();
        BigComplex::new(w.im.clone(), -w.re)
    }

    pub fn dist(&self, other: &BigComplex) -> BigReal {
        (self - other).abs()
    }

    pub fn to_decimal(&self, digits: usize) -> (String, String) {
        (self.re.to_decimal(digits), self.im.to_decimal(digits))
    }
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:?} + {:?}i)", self.re, self.im)
    }
}

impl From<BigReal> for BigComplex {
    fn from(x: BigReal) -> Self {
        BigComplex::from_real(x)
    }
}

macro_rules! forward_owned {
    ($trait:ident, $method:ident) => {
        impl $trait<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: &BigComplex) -> BigComplex {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $method(self, rhs: BigComplex) -> BigComplex {
                self.$method(&rhs)
            }
        }
    };
}

impl Add<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn add(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re + &rhs.re, &self.im + &rhs.im)
    }
}

impl Sub<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn sub(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(&self.re - &rhs.re, &self.im - &rhs.im)
    }
}

impl Mul<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigComplex) -> BigComplex {
        BigComplex::new(
            &self.re * &rhs.re - &self.im * &rhs.im,
            &self.re * &rhs.im + &self.im * &rhs.re,
        )
    }
}

impl Div<&BigComplex> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigComplex) -> BigComplex {
        // Smith's algorithm.
        if rhs.re.abs() >= rhs.im.abs() {
            let r = &rhs.im / &rhs.re;
            let d = &rhs.re + &r * &rhs.im;
            BigComplex::new(
                (&self.re + &r * &self.im) / &d,
                (&self.im - &r * &self.re) / &d,
            )
        } else {
            let r = &rhs.re / &rhs.im;
            let d = &rhs.im + &r * &rhs.re;
            BigComplex::new(
                (&r * &self.re + &self.im) / &d,
                (&r * &self.im - &self.re) / &d,
            )
        }
    }
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl Mul<&BigReal> for &BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigReal) -> BigComplex {
        self.scale(rhs)
    }
}

impl Mul<&BigReal> for BigComplex {
    type Output = BigComplex;
    fn mul(self, rhs: &BigReal) -> BigComplex {
        self.scale(rhs)
    }
}

impl Div<&BigReal> for &BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigReal) -> BigComplex {
        BigComplex::new(&self.re / rhs, &self.im / rhs)
    }
}

impl Div<&BigReal> for BigComplex {
    type Output = BigComplex;
    fn div(self, rhs: &BigReal) -> BigComplex {
        (&self) / rhs
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-self.re, -self.im)
    }
}

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex::new(-&self.re, -&self.im)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 200;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    fn close(a: &BigComplex, b: &BigComplex, tol: f64) -> bool {
        a.dist(b) < tol
    }

    #[test]
    fn sqrt_is_principal() {
        let s = c(-4.0, 0.0).sqrt();
        assert!(close(&s, &c(0.0, 2.0), 1e-50));
        let s = c(-4.0, -0.0).sqrt();
        assert!(close(&s, &c(0.0, -2.0), 1e-50));
        let z = c(-3.0, 1e-30);
        let s = z.sqrt();
        assert!(s.im > 0.0 && s.re > 0.0);
        assert!(close(&s.square(), &z, 1e-50));
    }

    #[test]
    fn exp_ln_roundtrip() {
        let z = c(0.3, -2.5);
        assert!(close(&z.ln().exp(), &z, 1e-50));
        assert!(close(&z.exp().ln(), &z, 1e-50));
    }

    #[test]
    fn powers_agree() {
        let z = c(1.25, -0.75);
        let a = BigComplex::from_f64(3.0, 0.0, P);
        assert!(close(&z.powc(&a), &z.powi(3), 1e-50));
        assert!(close(&z.powf(&BigReal::from_f64(-2.0, P)), &z.powi(-2), 1e-50));
    }

    #[test]
    fn acos_inverts_cos() {
        for (re, im) in [(0.3, 0.0), (0.5, 0.2), (-0.7, -0.4), (2.0, 0.5)] {
            let z = c(re, im);
            assert!(close(&z.acos().cos(), &z, 1e-45), "{re} {im}");
        }
        let w = c(0.5, 0.0).acos();
        assert!((w.re.to_f64() - std::f64::consts::FRAC_PI_3).abs() < 1e-15);
    }

    #[test]
    fn division_matches_reciprocal() {
        let a = c(1.0, 2.0);
        let b = c(-3.0, 0.5);
        assert!(close(&(&a / &b), &(&a * &b.recip()), 1e-50));
    }
}
