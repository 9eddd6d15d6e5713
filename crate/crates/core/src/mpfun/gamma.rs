//! Gamma function via Stirling's series with argument shifting.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::{Integer, Rational};

use super::{work_prec, BigReal};
use crate::error::{Error, Result};

/// Tangent numbers T_1..T_m by the Brent–Harvey in-place recurrence.
fn tangent_numbers(m: usize) -> Vec<Integer> {
    let mut t: Vec<Integer> = vec![Integer::new(); m + 1];
    if m == 0 {
        return Vec::new();
    }
    t[1] = Integer::from(1);
    for k in 2..=m {
        t[k] = Integer::from(&t[k - 1] * (k as u64 - 1));
    }
    for k in 2..=m {
        for j in k..=m {
            let a = Integer::from(&t[j - 1] * (j - k) as u64);
            let b = Integer::from(&t[j] * (j - k + 2) as u64);
            t[j] = a + b;
        }
    }
    t.remove(0);
    t
}

/// Exact B_2, B_4, ..., cached and grown on demand. Exact rationals, so the cache
/// cannot change any result.
fn bernoulli_cached(m: usize) -> Arc<Vec<Rational>> {
    static CACHE: OnceLock<Mutex<Arc<Vec<Rational>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(Arc::new(Vec::new())));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    if guard.len() < m {
        let size = m.max(2 * guard.len());
        let t = tangent_numbers(size);
        let b: Vec<Rational> = (1..=size)
            .map(|k| {
                let four_k = Integer::from(1) << (2 * k as u32);
                let den = &four_k * Integer::from(&four_k - 1);
                let mut num = Integer::from(&t[k - 1] * (2 * k) as u64);
                if k % 2 == 0 {
                    num = -num;
                }
                Rational::from((num, den))
            })
            .collect();
        *guard = Arc::new(b);
    }
    guard.clone()
}

/// Exact Bernoulli numbers B_2, B_4, ..., B_{2m}.
pub fn bernoulli_b2k(m: usize) -> Vec<Rational> {
    bernoulli_cached(m)[..m].to_vec()
}

/// `sin(pi x)` with exact reduction of `x` modulo 2.
pub(crate) fn sin_pi(x: &BigReal) -> BigReal {
    let p = x.prec();
    let r = x - &x.round();
    if r.is_zero() {
        return BigReal::zero(p);
    }
    let n = x.round();
    let s = (&r * &BigReal::pi(p + 8)).sin().with_prec(p);
    let odd = (n.mul_pow2(-1).floor().mul_pow2(1)) != n;
    if odd {
        -s
    } else {
        s
    }
}

/// `cos(pi x)` with exact reduction.
pub(crate) fn cos_pi(x: &BigReal) -> BigReal {
    sin_pi(&(x + 0.5))
}

fn is_nonpositive_integer(x: &BigReal) -> bool {
    x.is_integer() && !x.is_sign_positive() || (x.is_zero())
}

/// B_2k / (2k(2k-1)) rounded to `wp` bits, cached per precision.
fn stirling_coeffs(m: usize, wp: u32) -> Arc<Vec<BigReal>> {
    // Round the key up so that nearby precisions share one table.
    let wp = wp.div_ceil(64) * 64;
    type Table = HashMap<u32, Arc<Vec<BigReal>>>;
    static CACHE: OnceLock<Mutex<Table>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&wp) {
        if v.len() >= m {
            return v.clone();
        }
    }
    let bs = bernoulli_cached(m);
    let v: Vec<BigReal> = bs
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let k = (i + 1) as i64;
            BigReal::from_float(rug::Float::with_val(wp, b)) / BigReal::from_i64(2 * k * (2 * k - 1), wp)
        })
        .collect();
    let v = Arc::new(v);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert(wp, v.clone());
    v
}

/// Stirling's series for `ln Γ(z)`, `z` large enough that terms fall below `2^-wp`.
fn ln_gamma_stirling(z: &BigReal, wp: u32) -> BigReal {
    let half_ln_2pi = (BigReal::pi(wp).mul_pow2(1)).ln().mul_pow2(-1);
    let s = (z - 0.5) * z.ln() - z + half_ln_2pi;
    let zinv = z.recip();
    let zinv2 = zinv.square();
    let tol = -(wp as f64) - 4.0 + s.log2_abs().max(0.0);
    let mut m = (0.4 * f64::from(wp)) as usize + 8;
    loop {
        let cs = stirling_coeffs(m, wp);
        let mut pw = zinv.clone();
        let mut acc = BigReal::zero(wp);
        let mut prev = f64::INFINITY;
        for c in cs.iter() {
            let term = c * &pw;
            let mag = term.log2_abs();
            acc = acc + &term;
            // Stop once negligible, or at the smallest term of the divergent tail.
            if mag < tol || mag > prev {
                return s + acc;
            }
            prev = mag;
            pw = &pw * &zinv2;
        }
        if m >= 1 << 14 {
            return s + acc;
        }
        m *= 2;
    }
}

/// Shift such that Stirling's series reaches `2^-wp` before diverging.
fn shift_target(wp: u32) -> f64 {
    0.12 * f64::from(wp) + 8.0
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: &BigReal, prec: u32) -> Result<BigReal> {
    if !x.is_finite() || !x.is_sign_positive() || x.is_zero() {
        return Err(Error::Domain("ln_gamma requires x > 0".into()));
    }
    let wp = work_prec(prec) + 8;
    let xw = x.with_prec(wp.max(x.prec()));
    let (z, prod) = shifted(&xw, wp);
    Ok((ln_gamma_stirling(&z, wp) - prod.ln()).with_prec(prec))
}

/// Returns `(x + N, x (x+1) ... (x+N-1))`.
fn shifted(x: &BigReal, wp: u32) -> (BigReal, BigReal) {
    let target = shift_target(wp);
    let mut z = x.with_prec(wp.max(x.prec()));
    let mut prod = BigReal::one(wp);
    while z < target {
        prod = &prod * &z;
        z = z + 1.0;
    }
    (z, prod)
}

/// Γ(x) for `x > 0.5`, returned at `wp` bits.
fn gamma_pos(x: &BigReal, wp: u32) -> BigReal {
    // exp amplifies the absolute error of ln Γ by its magnitude.
    let extra = (x.to_f64().abs() * x.to_f64().abs().max(2.0).ln()).max(1.0).log2().ceil() as u32 + 4;
    let wp2 = wp + extra;
    let (z, prod) = shifted(&x.with_prec(wp2.max(x.prec())), wp2);
    (ln_gamma_stirling(&z, wp2).exp() / prod).with_prec(wp)
}

/// Γ(x). Fails with a pole error at nonpositive integers.
pub fn gamma_fn(x: &BigReal, prec: u32) -> Result<BigReal> {
    if !x.is_finite() {
        return Err(Error::Domain("gamma_fn of a non-finite value".into()));
    }
    if is_nonpositive_integer(x) {
        return Err(Error::Pole(format!("gamma at {}", x.to_decimal(20))));
    }
    let wp = work_prec(prec);
    if *x > 0.5 {
        return Ok(gamma_pos(x, wp).with_prec(prec));
    }
    // Reflection: Γ(x) = π / (sin(πx) Γ(1-x)).
    let xw = x.with_prec(wp.max(x.prec()));
    let one_minus = BigReal::one(wp) - &xw;
    let g = gamma_pos(&one_minus, wp);
    let s = sin_pi(&xw);
    Ok((BigReal::pi(wp) / (s * g)).with_prec(prec))
}

/// 1/Γ(x); exactly zero at nonpositive integers.
pub fn recip_gamma(x: &BigReal, prec: u32) -> BigReal {
    if is_nonpositive_integer(x) {
        return BigReal::zero(prec);
    }
    let wp = work_prec(prec);
    if *x > 0.5 {
        return gamma_pos(x, wp).recip().with_prec(prec);
    }
    let xw = x.with_prec(wp.max(x.prec()));
    let one_minus = BigReal::one(wp) - &xw;
    let g = gamma_pos(&one_minus, wp);
    (sin_pi(&xw) * g / BigReal::pi(wp)).with_prec(prec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Float;

    fn rel(a: &BigReal, b: &BigReal) -> f64 {
        ((a - b) / b).abs().to_f64()
    }

    fn mpfr_gamma(x: &BigReal, prec: u32) -> BigReal {
        BigReal::from_float(Float::with_val(prec + 64, x.as_float().gamma_ref()))
    }

    #[test]
    fn bernoulli_first_values() {
        let b = bernoulli_b2k(5);
        let expect = [(1, 6), (-1, 30), (1, 42), (-1, 30), (5, 66)];
        for (got, (n, d)) in b.iter().zip(expect) {
            assert_eq!(*got, Rational::from((n, d)));
        }
        let b = bernoulli_b2k(13);
        assert_eq!(b[12], Rational::from((8_553_103, 6)));
    }

    #[test]
    fn trivial_values() {
        let p = 256;
        assert_eq!(gamma_fn(&BigReal::from_i64(5, p), p).unwrap().to_f64(), 24.0);
        let half = BigReal::from_f64(0.5, p);
        let sqrt_pi = BigReal::pi(p).sqrt();
        assert!(rel(&gamma_fn(&half, p).unwrap(), &sqrt_pi) < 1e-70);
        assert!(rel(&recip_gamma(&half, p), &sqrt_pi.recip()) < 1e-70);
        let mhalf = BigReal::from_f64(-0.5, p);
        assert!(rel(&gamma_fn(&mhalf, p).unwrap(), &(sqrt_pi.mul_i64(-2))) < 1e-70);
        assert!(recip_gamma(&BigReal::zero(p), p).is_zero());
        assert!(recip_gamma(&BigReal::from_i64(-3, p), p).is_zero());
        assert!(matches!(gamma_fn(&BigReal::from_i64(-2, p), p), Err(Error::Pole(_))));
        assert!(matches!(gamma_fn(&BigReal::zero(p), p), Err(Error::Pole(_))));
    }

    #[test]
    fn matches_mpfr_oracle() {
        for prec in [64u32, 256, 1024] {
            let tol = 2f64.powi(-(prec as i32) + 16);
            for s in ["0.001", "0.25", "0.75", "1.5", "3.3", "17.125", "123.456", "-0.3", "-4.75", "-11.01"] {
                let x = BigReal::parse(s, prec).unwrap();
                let got = gamma_fn(&x, prec).unwrap();
                let want = mpfr_gamma(&x, prec);
                assert!(rel(&got, &want) <= tol, "prec {prec} x {s}: {}", rel(&got, &want));
                let rg = recip_gamma(&x, prec);
                assert!(rel(&rg, &want.recip()) <= tol);
            }
        }
    }

    #[test]
    fn ln_gamma_matches_mpfr() {
        let p = 300;
        for s in ["0.1", "2.5", "50", "1000.5"] {
            let x = BigReal::parse(s, p).unwrap();
            let got = ln_gamma(&x, p).unwrap();
            let want = BigReal::from_float(Float::with_val(p + 64, x.as_float().ln_gamma_ref()));
            assert!(((&got - &want).abs() / want.abs().max_ref(&BigReal::one(p))).to_f64() < 1e-85);
        }
    }

    #[test]
    fn sin_pi_exact_at_integers() {
        for k in -5..6 {
            assert!(sin_pi(&BigReal::from_i64(k, 128)).is_zero());
        }
        let s = sin_pi(&BigReal::from_f64(-3.5, 128));
        assert_eq!(s.to_f64(), 1.0);
        assert!((cos_pi(&BigReal::from_i64(3, 128)).to_f64() + 1.0).abs() < 1e-30);
    }
}
