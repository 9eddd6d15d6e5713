//! Bessel functions J_ν, Y_ν, K_ν of real order.
//!
//! Each function first tries the large-argument expansion and accepts it only if
//! its terms fall below `2^-wp` before they start growing; otherwise it falls back
//! to the ascending series, evaluated with enough extra bits to absorb the
//! cancellation. Integer orders of Y and K go through a symmetric Richardson limit.

use super::gamma::{cos_pi, sin_pi};
use super::{recip_gamma, work_prec, BigComplex, BigReal};
use crate::error::{Error, Result};

const LOG2_E: f64 = std::f64::consts::LOG2_E;

fn check_x(x: &BigReal, what: &str) -> Result<()> {
    if !x.is_finite() || x.is_zero() || x.is_sign_negative() {
        return Err(Error::Domain(format!("{what} requires x > 0")));
    }
    Ok(())
}

/// Σ_k (±x²/4)^k (x/2)^μ / (k! Γ(k+μ+1)) at `wp` bits; `sign` is the sign of x²/4.
fn ascending(mu: &BigReal, x: &BigReal, sign: i64, wp: u32) -> BigReal {
    let x = x.with_prec(wp);
    let mu = mu.with_prec(wp);
    let half = x.mul_pow2(-1);
    let q = half.square().mul_i64(sign);
    let mut t = half.powf(&mu) * recip_gamma(&(&mu + 1.0), wp);
    let mut sum = t.clone();
    let kmin = (x.to_f64() / 2.0).ceil() as i64 + 1;
    let tol = -(wp as f64) - 2.0;
    let mut k = 1i64;
    loop {
        let den = (&mu + k as f64).mul_i64(k);
        t = &t * &q / den;
        sum = sum + &t;
        if k > kmin && (t.is_zero() || t.log2_abs() < sum.log2_abs() + tol) {
            break;
        }
        k += 1;
    }
    sum
}

/// Large-argument expansion of K_ν at real `x`; `None` if it cannot reach `2^-wp`.
fn k_asymptotic(nu: &BigReal, x: &BigReal, wp: u32) -> Option<BigReal> {
    let x = x.with_prec(wp);
    let four_nu2 = nu.with_prec(wp).square().mul_pow2(2);
    let tol = -(wp as f64) - 2.0;
    let mut t = BigReal::one(wp);
    let mut sum = BigReal::one(wp);
    let mut prev = 0.0f64;
    for k in 1..(4 * wp as i64) {
        let odd = (2 * k - 1) as f64;
        let num = &four_nu2 - odd * odd;
        t = &t * &num / (x.mul_i64(8 * k));
        if t.is_zero() {
            break;
        }
        let mag = t.log2_abs();
        if mag < tol {
            sum = sum + &t;
            break;
        }
        if k > 1 && mag > prev {
            return None;
        }
        prev = mag;
        sum = sum + &t;
    }
    let pref = (BigReal::pi(wp) / x.mul_pow2(1)).sqrt() * (-&x).exp();
    Some(pref * sum)
}

/// K_ν(x) = π (I_{-ν} - I_ν) / (2 sin νπ) for non-integer ν.
fn k_series(nu: &BigReal, x: &BigReal, wp: u32) -> BigReal {
    let s = sin_pi(&nu.with_prec(wp));
    let extra = (2.0 * x.to_f64() * LOG2_E).max(0.0) + (-s.log2_abs()).max(0.0) + 16.0;
    let wp2 = wp + extra.ceil() as u32;
    let i_minus = ascending(&(-nu), x, 1, wp2);
    let i_plus = ascending(nu, x, 1, wp2);
    let s = sin_pi(&nu.with_prec(wp2));
    (BigReal::pi(wp2) * (i_minus - i_plus) / s.mul_pow2(1)).with_prec(wp)
}

/// Modified Bessel function of the second kind, `0 <= ν < 1`, `x > 0`.
pub fn bessel_k(nu: &BigReal, x: &BigReal, prec: u32) -> Result<BigReal> {
    check_x(x, "bessel_k")?;
    if nu.is_sign_negative() && !nu.is_zero() || *nu >= 1.0 {
        return Err(Error::Domain("bessel_k requires 0 <= nu < 1".into()));
    }
    let wp = work_prec(prec);
    if let Some(v) = k_asymptotic(nu, x, wp) {
        return Ok(v.with_prec(prec));
    }
    if nu.is_zero() {
        // K is even in ν: (4 K_{h/2} - K_h)/3 = K_0 + O(h^4).
        let h = BigReal::exp2i(-(wp as i32 / 3) - 1, wp);
        let f1 = k_series(&h, x, wp);
        let f2 = k_series(&h.mul_pow2(-1), x, wp);
        return Ok(((f2.mul_pow2(2) - f1) / BigReal::from_i64(3, wp)).with_prec(prec));
    }
    Ok(k_series(nu, x, wp).with_prec(prec))
}

fn c_ascending(mu: &BigReal, z: &BigComplex, wp: u32) -> BigComplex {
    let z = z.with_prec(wp);
    let mu = mu.with_prec(wp);
    let half = z.mul_pow2(-1);
    let q = half.square();
    let mut t = half.powf(&mu).scale(&recip_gamma(&(&mu + 1.0), wp));
    let mut sum = t.clone();
    let kmin = (z.abs().to_f64() / 2.0).ceil() as i64 + 1;
    let tol = -(wp as f64) - 2.0;
    let mut k = 1i64;
    loop {
        let den = (&mu + k as f64).mul_i64(k);
        t = (&t * &q) / &den;
        sum = &sum + &t;
        if k > kmin && (t.is_zero() || t.abs().log2_abs() < sum.abs().log2_abs() + tol) {
            break;
        }
        k += 1;
    }
    sum
}

/// K_ν(z) for complex `z` with `Re z > 0`.
pub fn bessel_k_complex(nu: &BigReal, z: &BigComplex, prec: u32) -> Result<BigComplex> {
    if !z.re.is_sign_positive() || z.re.is_zero() {
        return Err(Error::Domain("bessel_k_complex requires Re z > 0".into()));
    }
    if nu.is_sign_negative() && !nu.is_zero() || *nu >= 1.0 {
        return Err(Error::Domain("bessel_k_complex requires 0 <= nu < 1".into()));
    }
    if z.im.is_zero() {
        return Ok(BigComplex::from_real(bessel_k(nu, &z.re, prec)?));
    }
    let wp = work_prec(prec);
    let zw = z.with_prec(wp);
    // Asymptotic attempt.
    {
        let four_nu2 = nu.with_prec(wp).square().mul_pow2(2);
        let tol = -(wp as f64) - 2.0;
        let mut t = BigComplex::one(wp);
        let mut sum = BigComplex::one(wp);
        let mut prev = 0.0f64;
        let mut ok = true;
        for k in 1..(4 * wp as i64) {
            let odd = (2 * k - 1) as f64;
            let num = &four_nu2 - odd * odd;
            t = (&t * &num) / &zw.scale(&BigReal::from_i64(8 * k, wp));
            if t.is_zero() {
                break;
            }
            let mag = t.abs().log2_abs();
            if mag < tol {
                sum = &sum + &t;
                break;
            }
            if k > 1 && mag > prev {
                ok = false;
                break;
            }
            prev = mag;
            sum = &sum + &t;
        }
        if ok {
            let pref = (BigComplex::from_real(BigReal::pi(wp)) / zw.mul_pow2(1)).sqrt() * (-&zw).exp();
            return Ok((pref * sum).with_prec(prec));
        }
    }
    let series = |mu: &BigReal, wp: u32| -> BigComplex {
        let s = sin_pi(&mu.with_prec(wp));
        let extra = 2.0 * zw.abs().to_f64() * LOG2_E + (-s.log2_abs()).max(0.0) + 16.0;
        let wp2 = wp + extra.ceil() as u32;
        let im = c_ascending(&(-mu), &zw, wp2);
        let ip = c_ascending(mu, &zw, wp2);
        let s = sin_pi(&mu.with_prec(wp2));
        ((im - ip).scale(&BigReal::pi(wp2)) / &s.mul_pow2(1)).with_prec(wp)
    };
    if nu.is_zero() {
        let h = BigReal::exp2i(-(wp as i32 / 3) - 1, wp);
        let f1 = series(&h, wp);
        let f2 = series(&h.mul_pow2(-1), wp);
        return Ok(((f2.mul_pow2(2) - f1) / &BigReal::from_i64(3, wp)).with_prec(prec));
    }
    Ok(series(nu, wp).with_prec(prec))
}

/// Hankel expansion; returns `(J_ν(x), Y_ν(x))` or `None` if it cannot reach `2^-wp`.
fn jy_asymptotic(nu: &BigReal, x: &BigReal, wp: u32) -> Option<(BigReal, BigReal)> {
    let x = x.with_prec(wp);
    let nu = nu.with_prec(wp);
    let four_nu2 = nu.square().mul_pow2(2);
    let two_nu = 2.0 * nu.to_f64().abs();
    let tol = -(wp as f64) - 2.0;
    let mut u = BigReal::one(wp);
    let mut p = BigReal::one(wp);
    let mut q = BigReal::zero(wp);
    let mut prev = f64::INFINITY;
    let mut converged = false;
    for k in 1..(4 * wp as i64) {
        let odd = (2 * k - 1) as f64;
        u = &u * (&four_nu2 - odd * odd) / x.mul_i64(8 * k);
        if u.is_zero() {
            converged = true;
            break;
        }
        // k = 2m -> P gets (-1)^m u, k = 2m+1 -> Q gets (-1)^m u.
        let m = k / 2;
        let signed = if m % 2 == 0 { u.clone() } else { -&u };
        if k % 2 == 0 {
            p = p + &signed;
        } else {
            q = q + &signed;
        }
        let mag = u.log2_abs();
        if mag < tol {
            converged = true;
            break;
        }
        if odd > two_nu + 1.0 && mag > prev {
            return None;
        }
        prev = mag;
    }
    if !converged {
        return None;
    }
    let pi = BigReal::pi(wp);
    let omega = &x - (nu.mul_pow2(-1) + 0.25) * &pi;
    let (s, c) = (omega.sin(), omega.cos());
    let amp = (BigReal::from_i64(2, wp) / (&pi * &x)).sqrt();
    let j = &amp * (&p * &c - &q * &s);
    let y = &amp * (&p * &s + &q * &c);
    Some((j, y))
}

fn j_series(mu: &BigReal, x: &BigReal, wp: u32) -> BigReal {
    let extra = x.to_f64() * LOG2_E + 16.0;
    ascending(mu, x, -1, wp + extra.ceil() as u32).with_prec(wp)
}

/// Y_μ for non-integer μ via J_{±μ}.
fn y_series(mu: &BigReal, x: &BigReal, wp: u32) -> BigReal {
    let s = sin_pi(&mu.with_prec(wp));
    let extra = (-s.log2_abs()).max(0.0) + 8.0;
    let wp2 = wp + extra.ceil() as u32;
    let jp = j_series(mu, x, wp2);
    let jm = j_series(&(-mu), x, wp2);
    let mu2 = mu.with_prec(wp2);
    ((jp * cos_pi(&mu2) - jm) / sin_pi(&mu2)).with_prec(wp)
}

fn check_order(nu: &BigReal) -> Result<()> {
    if !nu.is_finite() || nu.is_sign_negative() && !nu.is_zero() {
        return Err(Error::Domain("Bessel order must be >= 0".into()));
    }
    Ok(())
}

/// `(J_ν(x), Y_ν(x))` for `ν >= 0`, `x > 0`.
pub fn bessel_jy(nu: &BigReal, x: &BigReal, prec: u32) -> Result<(BigReal, BigReal)> {
    check_x(x, "bessel_jy")?;
    check_order(nu)?;
    let wp = work_prec(prec);
    if let Some((j, y)) = jy_asymptotic(nu, x, wp) {
        return Ok((j.with_prec(prec), y.with_prec(prec)));
    }
    let j = j_series(nu, x, wp);
    let y = if nu.is_integer() {
        // Y is smooth in the order: symmetric average, then Richardson in h^2.
        let h = BigReal::exp2i(-(wp as i32 / 3) - 1, wp);
        let avg = |h: &BigReal| (y_series(&(nu + h), x, wp) + y_series(&(nu - h), x, wp)).mul_pow2(-1);
        let f1 = avg(&h);
        let f2 = avg(&h.mul_pow2(-1));
        (f2.mul_pow2(2) - f1) / BigReal::from_i64(3, wp)
    } else {
        y_series(nu, x, wp)
    };
    Ok((j.with_prec(prec), y.with_prec(prec)))
}

/// Bessel function of the first kind, `ν >= 0`, `x > 0`.
pub fn bessel_j(nu: &BigReal, x: &BigReal, prec: u32) -> Result<BigReal> {
    check_x(x, "bessel_j")?;
    check_order(nu)?;
    let wp = work_prec(prec);
    if let Some((j, _)) = jy_asymptotic(nu, x, wp) {
        return Ok(j.with_prec(prec));
    }
    Ok(j_series(nu, x, wp).with_prec(prec))
}

/// Bessel function of the second kind, `ν >= 0`, `x > 0`.
pub fn bessel_y(nu: &BigReal, x: &BigReal, prec: u32) -> Result<BigReal> {
    Ok(bessel_jy(nu, x, prec)?.1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(s: &str, p: u32) -> BigReal {
        BigReal::parse(s, p).unwrap()
    }

    fn rel(a: &BigReal, b: &BigReal) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    fn k_half(x: &BigReal) -> BigReal {
        let p = x.prec();
        (BigReal::pi(p) / x.mul_pow2(1)).sqrt() * (-x).exp()
    }

    /// K_0 from its logarithmic series, independent of the Richardson path.
    fn k0_log_series(x: &BigReal, p: u32) -> BigReal {
        let wp = p + 3 * (x.to_f64() * LOG2_E) as u32 + 64;
        let x = x.with_prec(wp);
        let q = x.mul_pow2(-1).square();
        let mut t = BigReal::one(wp);
        let mut h = BigReal::zero(wp);
        let mut i0 = BigReal::one(wp);
        let mut acc = BigReal::zero(wp);
        for k in 1..2000i64 {
            t = &t * &q / BigReal::from_i64(k * k, wp);
            h = h + BigReal::from_ratio(1, k, wp);
            i0 = i0 + &t;
            acc = acc + &t * &h;
            if t.log2_abs() < -(wp as f64) && k as f64 > x.to_f64() {
                break;
            }
        }
        -((x.mul_pow2(-1)).ln() + BigReal::euler_gamma(wp)) * i0 + acc
    }

    #[test]
    fn k_closed_form_half() {
        let p = 256;
        let nu = BigReal::from_f64(0.5, p);
        for s in ["0.001", "1", "7.5", "40", "300"] {
            let x = r(s, p);
            let got = bessel_k(&nu, &x, p).unwrap();
            assert!(rel(&got, &k_half(&x)) < 2f64.powi(-(p as i32) + 16), "{s}");
        }
    }

    #[test]
    fn k_near_half_uses_series() {
        // Same function a hair away from 1/2 exercises the series path.
        let p = 192;
        let nu = BigReal::from_f64(0.5, p) + BigReal::exp2i(-200, p + 64);
        let x = r("3", p);
        let got = bessel_k(&nu.with_prec(p + 64), &x, p).unwrap();
        assert!(rel(&got, &k_half(&x.with_prec(p + 64))) < 1e-50);
    }

    #[test]
    fn k_small_and_large_argument_laws() {
        let p = 128;
        let nu = r("0.25", p);
        let gamma = |t: &BigReal| super::super::gamma_fn(t, p).unwrap();
        let law = |x: &BigReal| gamma(&nu) * BigReal::from_f64(2f64.powf(-0.75), p) * x.powf(&-&nu);
        // At x = 1e-6 the leading law is off by (x/2)^{2ν} Γ(1-ν)/Γ(1+ν) ≈ 9.6e-4,
        // so check that defect itself, then the 1e-4 band where it applies.
        let x = r("1e-6", p);
        let k = bessel_k(&nu, &x, p).unwrap();
        let defect = (&k / &law(&x)).add_f64(-1.0);
        let one = BigReal::one(p);
        let predicted = -(x.mul_pow2(-1).powf(&nu.mul_pow2(1)) * gamma(&(&one - &nu)) / gamma(&(&one + &nu)));
        assert!(rel(&defect, &predicted) < 1e-2);
        let x = r("1e-12", p);
        let k = bessel_k(&nu, &x, p).unwrap();
        assert!(rel(&k, &law(&x)) <= 1e-4);
        let x = r("50", p);
        let k = bessel_k(&nu, &x, p).unwrap();
        assert!(rel(&k, &k_half(&x)) <= 1e-2);
    }

    #[test]
    fn k_zero_order_matches_log_series() {
        let p = 200;
        for s in ["0.01", "0.9", "6", "30"] {
            let x = r(s, p);
            let got = bessel_k(&BigReal::zero(p), &x, p).unwrap();
            let want = k0_log_series(&x, p);
            assert!(rel(&got, &want) < 2f64.powi(-(p as i32) + 16), "{s}: {}", rel(&got, &want));
        }
    }

    #[test]
    fn k_regimes_agree_at_switch() {
        // Near the switch both routes must agree: compare series and expansion directly.
        let wp = 160;
        let nu = r("0.3", wp);
        let x = r("60", wp);
        let a = k_series(&nu, &x, wp);
        let b = k_asymptotic(&nu, &x, wp).expect("expansion converges at x=60");
        assert!(rel(&a, &b) < 2f64.powi(-140));
    }

    #[test]
    fn k_complex_reduces_and_matches_closed_form() {
        let p = 160;
        let nu = r("0.5", p);
        let z = BigComplex::from_f64(0.7, 1.3, p);
        let got = bessel_k_complex(&nu, &z, p).unwrap();
        let want = (BigComplex::from_real(BigReal::pi(p)) / z.mul_pow2(1)).sqrt() * (-&z).exp();
        assert!(got.dist(&want) / want.abs() < 1e-40);
        // Series route, ν = 1/4, vs its own conjugate symmetry and real limit.
        let nu = r("0.25", p);
        let z = BigComplex::from_f64(1.1, 0.4, p);
        let a = bessel_k_complex(&nu, &z, p).unwrap();
        let b = bessel_k_complex(&nu, &z.conj(), p).unwrap();
        assert!(a.dist(&b.conj()) < 1e-40);
        let zr = BigComplex::from_f64(1.1, 1e-30, p);
        let c = bessel_k_complex(&nu, &zr, p).unwrap();
        let d = bessel_k(&nu, &BigReal::from_f64(1.1, p), p).unwrap();
        assert!((&c.re - &d).abs() < 1e-28);
    }

    #[test]
    fn j_y_half_order_closed_forms() {
        let p = 256;
        let nu = r("0.5", p);
        let tol = 2f64.powi(-(p as i32) + 16);
        let pi = BigReal::pi(p + 32);
        let x = pi.with_prec(p);
        let j = bessel_j(&nu, &x, p).unwrap();
        assert!(j.abs() < tol);
        let x = pi.mul_pow2(-1).with_prec(p);
        let y = bessel_y(&nu, &x, p).unwrap();
        assert!(y.abs() < tol);
        for s in ["0.3", "2", "25", "400"] {
            let x = r(s, p);
            let amp = (BigReal::from_i64(2, p) / (BigReal::pi(p) * &x)).sqrt();
            let (j, y) = bessel_jy(&nu, &x, p).unwrap();
            assert!((&j - &(&amp * x.sin())).abs() < tol, "{s}");
            assert!((&y + &(&amp * x.cos())).abs() < tol, "{s}");
        }
    }

    #[test]
    fn wronskian_quarter_order() {
        let p = 128u32;
        let hp = 4 * p;
        let nu = r("0.25", hp);
        let x = r("3.7", hp);
        let h = BigReal::exp2i(-(p as i32), hp);
        let d = |f: &dyn Fn(&BigReal) -> BigReal| (f(&(&x + &h)) - f(&(&x - &h))) / h.mul_pow2(1);
        let jf = |t: &BigReal| bessel_j(&nu, t, hp).unwrap();
        let yf = |t: &BigReal| bessel_y(&nu, t, hp).unwrap();
        let w = jf(&x) * d(&yf) - d(&jf) * yf(&x);
        let want = BigReal::from_i64(2, hp) / (BigReal::pi(hp) * &x);
        assert!(rel(&w, &want) < 10f64.powf(-0.3 * p as f64));
    }

    #[test]
    fn y_integer_order_limit() {
        // Y_0 via the expansion at large x vs the Richardson series path at moderate x,
        // linked through the Wronskian with J_0.
        let p = 160;
        let nu = BigReal::zero(p);
        for s in ["0.5", "4.25"] {
            let x = r(s, p);
            let (j0, y0) = bessel_jy(&nu, &x, p).unwrap();
            // J_1, Y_1 from the order-one integer path; W = J_1 Y_0 - J_0 Y_1 = 2/(πx).
            let (j1, y1) = bessel_jy(&BigReal::one(p), &x, p).unwrap();
            let w = &j1 * &y0 - &j0 * &y1;
            let want = BigReal::from_i64(2, p) / (BigReal::pi(p) * &x);
            assert!(rel(&w, &want) < 1e-40, "{s}: {}", rel(&w, &want));
        }
    }

    #[test]
    fn j_regimes_agree() {
        let wp = 128;
        let nu = r("0.25", wp);
        let x = r("70", wp);
        let a = j_series(&nu, &x, wp);
        let (b, _) = jy_asymptotic(&nu, &x, wp).expect("converges");
        assert!((&a - &b).abs() < 2f64.powi(-110));
        let ya = y_series(&nu, &x, wp);
        let (_, yb) = jy_asymptotic(&nu, &x, wp).unwrap();
        assert!((&ya - &yb).abs() < 2f64.powi(-110));
    }

    #[test]
    fn domain_errors() {
        let p = 64;
        assert!(bessel_k(&r("0.25", p), &BigReal::zero(p), p).is_err());
        assert!(bessel_k(&r("1.5", p), &BigReal::one(p), p).is_err());
        assert!(bessel_j(&r("0.25", p), &r("-1", p), p).is_err());
        assert!(bessel_y(&r("0.25", p), &BigReal::zero(p), p).is_err());
    }
}
