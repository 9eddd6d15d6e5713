//! Szegő functions, the global parametrix `N₀`, and the outer and inner
//! asymptotic formulas for `P̃_n`.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::Integer;
use serde::Serialize;

use crate::equilibrium::{g_fn, psi_complex, psi_even, theta_n, EquilibriumContext};
use crate::error::{domain, Result};
use crate::exec::Exec;
use crate::mpfun::{bessel_k, bessel_k_complex, BigComplex, BigReal, GUARD_BITS};
use crate::quad::{Node, Quad};
use crate::zeros::epsilon_n;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Regime {
    Outer,
    Inner,
}

/// The two oscillating terms of the inner formula and their common prefactor.
#[derive(Clone, Debug)]
pub struct InnerParts {
    pub prefactor: BigComplex,
    /// `exp(νπψ/2 + iθ_n)`.
    pub term1: BigComplex,
    /// `exp(-νπψ/2 - iθ_n)`.
    pub term2: BigComplex,
}

#[derive(Clone, Debug)]
pub struct AsymptoticPrediction {
    pub value: BigComplex,
    pub error_scale: BigReal,
    pub regime: Regime,
    pub inner: Option<InnerParts>,
}

fn off_interval(z: &BigComplex, what: &str) -> Result<()> {
    if !z.is_finite() || (z.im.is_zero() && z.re.abs() <= 1.0) {
        return domain(format!("{what} is analytic off [-1, 1]"));
    }
    Ok(())
}

/// `(z²-1)^{1/2}` analytic off `[-1, 1]`, positive for `z > 1`.
pub fn sqrt_z2m1(z: &BigComplex) -> BigComplex {
    let one = BigReal::one(z.prec());
    z.add_real(&-one.clone()).sqrt() * z.add_real(&one).sqrt()
}

/// `W_n(z) = √(2n) K_ν(±nπz) e^{±nπz}` on the half-plane `±Re z > 0`.
pub fn w_weight(z: &BigComplex, n: usize, nu: &BigReal, prec: u32) -> Result<BigComplex> {
    if z.re.is_zero() {
        return domain("W_n has a cut on the imaginary axis");
    }
    let wp = prec + GUARD_BITS;
    let zw = if z.re.is_sign_negative() { -z.with_prec(wp) } else { z.with_prec(wp) };
    let arg = zw.scale(&(BigReal::pi(wp) * BigReal::from_i64(n as i64, wp)));
    let k = bessel_k_complex(nu, &arg, wp)?;
    let root = BigReal::from_i64(2 * n as i64, wp).sqrt();
    Ok((k * arg.exp()).scale(&root).with_prec(prec))
}

/// `log W_n(x)` for real `x > 0`.
pub fn log_w_real(x: &BigReal, n: usize, nu: &BigReal, prec: u32) -> Result<BigReal> {
    let wp = prec + GUARD_BITS;
    let arg = x.abs().with_prec(wp) * BigReal::pi(wp) * BigReal::from_i64(n as i64, wp);
    let k = bessel_k(nu, &arg, wp)?;
    let half_log = BigReal::from_i64(2 * n as i64, wp).ln().mul_pow2(-1);
    Ok((half_log + k.ln() + arg).with_prec(prec))
}

/// `(z / (z + √(z²-1)))^{α/2}`, principal power.
pub fn szego_power(z: &BigComplex, alpha: &BigReal) -> Result<BigComplex> {
    off_interval(z, "szego_power")?;
    let f = z + sqrt_z2m1(z);
    Ok((z / &f).powf(&alpha.mul_pow2(-1)))
}

/// `((√(z²-1) - i)/(√(z²-1) + i))^{ν/4}`, principal power.
pub fn d2(z: &BigComplex, nu: &BigReal) -> Result<BigComplex> {
    off_interval(z, "d2")?;
    Ok(d2_ratio(z).powf(&nu.mul_pow2(-2)))
}

fn d2_ratio(z: &BigComplex) -> BigComplex {
    let s = sqrt_z2m1(z);
    let i = BigComplex::i(z.prec());
    (&s - &i) / (&s + &i)
}

/// `|log D₂(z) - (∓νπψ/2 ∓ νπi/4)|` with the signs of the quadrant of `z`.
pub fn d2_psi_consistency(z: &BigComplex, nu: &BigReal) -> Result<BigReal> {
    off_interval(z, "d2_psi_consistency")?;
    if z.re.is_zero() || z.im.is_zero() {
        return domain("d2_psi_consistency needs z off both axes");
    }
    let p = z.prec();
    let log_d2 = d2_ratio(z).ln().scale(&nu.mul_pow2(-2));
    let psi = psi_even(z)?;
    let half = (BigReal::pi(p) * nu).mul_pow2(-1);
    let quarter = half.mul_pow2(-1);
    let psi_part = psi.scale(&half);
    let psi_part = if z.im.is_sign_positive() { -psi_part } else { psi_part };
    let i_part = if z.re.is_sign_positive() { -quarter } else { quarter };
    let want = psi_part + BigComplex::new(BigReal::zero(p), i_part);
    Ok(log_d2.dist(&want))
}

/// `N₀` in the `β` form, row-major.
pub fn n0_matrix(z: &BigComplex) -> Result<[[BigComplex; 2]; 2]> {
    off_interval(z, "n0_matrix")?;
    let p = z.prec();
    let one = BigReal::one(p);
    let ratio = z.add_real(&-one.clone()) / z.add_real(&one);
    let beta = ratio.powf(&BigReal::from_f64(0.25, p));
    let binv = beta.recip();
    let a = (&beta + &binv).mul_pow2(-1);
    // (β - β⁻¹)/(2i) = -i(β - β⁻¹)/2.
    let b = (&beta - &binv).mul_pow2(-1).mul_i().scale(&-one);
    Ok([[a.clone(), b.clone()], [-b, a]])
}

/// `N₀` in the `f` form: `f^{1/2} = (√(z+1) + √(z-1))/√2` and
/// `(z²-1)^{1/4} = (z-1)^{1/4}(z+1)^{1/4}`.
pub fn n0_matrix_f_form(z: &BigComplex) -> Result<[[BigComplex; 2]; 2]> {
    off_interval(z, "n0_matrix_f_form")?;
    let p = z.prec();
    let one = BigReal::one(p);
    let zp = z.add_real(&one);
    let zm = z.add_real(&-one.clone());
    let sqrt2 = BigReal::from_i64(2, p).sqrt();
    let fh = (zp.sqrt() + zm.sqrt()) / &sqrt2;
    let fh_inv = fh.recip();
    let q = BigReal::from_f64(0.25, p);
    let quarter = zm.powf(&q) * zp.powf(&q);
    let k = (quarter.scale(&sqrt2)).recip();
    let i = BigComplex::i(p);
    Ok([
        [&fh * &k, &(&i * &fh_inv) * &k],
        [-(&(&i * &fh_inv) * &k), &fh * &k],
    ])
}

pub fn det2(m: &[[BigComplex; 2]; 2]) -> BigComplex {
    &m[0][0] * &m[1][1] - &m[0][1] * &m[1][0]
}

type CacheKey = (Integer, i32, Integer, i32);

fn key_of(x: &BigReal, om: &BigReal) -> Option<CacheKey> {
    let (a, e) = x.as_float().to_integer_exp()?;
    let (b, f) = om.as_float().to_integer_exp()?;
    Some((a, e, b, f))
}

/// Evaluator for the first Szegő function `D_{1,n}` at fixed `(n, ν, prec)`.
///
/// The integrand `log W_n(x)/√(1-x²)` is memoized per quadrature node; the memo
/// stores exactly what the uncached path computes, so both agree bitwise.
pub struct SzegoContext {
    pub n: usize,
    pub nu: BigReal,
    pub prec: u32,
    quad: Quad,
    cache: Option<Mutex<HashMap<CacheKey, BigReal>>>,
}

impl SzegoContext {
    pub fn new(n: usize, nu: &BigReal, prec: u32) -> Self {
        let wp = prec + GUARD_BITS / 2;
        SzegoContext {
            n,
            nu: nu.with_prec(wp),
            prec,
            quad: Quad::new(wp),
            cache: Some(Mutex::new(HashMap::new())),
        }
    }

    pub fn uncached(n: usize, nu: &BigReal, prec: u32) -> Self {
        SzegoContext {
            cache: None,
            ..SzegoContext::new(n, nu, prec)
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.quad = self.quad.with_exec(exec);
        self
    }

    /// Loosen the quadrature target to `2^tol_log2 · Σ|w f|`.
    pub fn with_tol_log2(mut self, tol_log2: f64) -> Self {
        self.quad = self.quad.with_tol_log2(tol_log2);
        self
    }

    fn wp(&self) -> u32 {
        self.quad.prec
    }

    pub fn cache_len(&self) -> usize {
        self.cache
            .as_ref()
            .map(|c| c.lock().unwrap_or_else(|e| e.into_inner()).len())
            .unwrap_or(0)
    }

    fn weight_term(&self, x: &BigReal, om: &BigReal) -> Result<BigReal> {
        let compute = || -> Result<BigReal> {
            let lw = log_w_real(x, self.n, &self.nu, self.wp())?;
            Ok(lw / (om * (x + 1.0)).sqrt())
        };
        let Some(cache) = &self.cache else {
            return compute();
        };
        let Some(key) = key_of(x, om) else {
            return compute();
        };
        if let Some(v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(v.clone());
        }
        let v = compute()?;
        cache.lock().unwrap_or_else(|e| e.into_inner()).insert(key, v.clone());
        Ok(v)
    }

    fn node_term(&self, b: &BigReal, node: &Node) -> Result<BigReal> {
        let om = if *b == 1.0 {
            node.to_b.clone()
        } else {
            BigReal::one(self.wp()) - &node.x
        };
        self.weight_term(&node.x, &om)
    }

    /// Powers of 4 in `[lower, 1]`, plus `0`.
    fn lattice(&self, lower: f64) -> Vec<BigReal> {
        let wp = self.wp();
        let mut v = vec![BigReal::zero(wp)];
        let mut k = 0i32;
        let mut pts = Vec::new();
        while 4f64.powi(-k) >= lower && k < 600 {
            pts.push(BigReal::exp2i(-2 * k, wp));
            k += 1;
        }
        pts.reverse();
        v.extend(pts);
        v
    }

    fn scale_lower(&self) -> f64 {
        1.0 / (self.n as f64 * std::f64::consts::PI) / 16.0
    }

    fn integrate<T, F>(&self, breaks: &[BigReal], f: F) -> Result<T>
    where
        T: crate::quad::QuadValue,
        F: Fn(&BigReal, &Node) -> Result<T> + Sync + Send,
    {
        let mut acc = T::zero_like(self.wp());
        for w in breaks.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let b = &w[1];
            let r = self.quad.integrate(&w[0], b, |node: &Node| f(b, node))?;
            acc = acc.plus(&r.value);
        }
        Ok(acc)
    }

    /// `D_{∞,n} = exp((1/π) ∫_0^1 log W_n(x)/√(1-x²) dx)`.
    pub fn d_infty(&self) -> Result<BigReal> {
        let br = self.lattice(self.scale_lower());
        let v: BigReal = self.integrate(&br, |b, node| self.node_term(b, node))?;
        Ok((v / BigReal::pi(self.wp())).exp().with_prec(self.prec))
    }

    /// `D_{1,n}(z)` for `z ∉ [-1, 1]`, using evenness of `W_n`:
    /// `exp((z²-1)^{1/2} (z/π) ∫_0^1 log W_n(x)/(√(1-x²)(z²-x²)) dx)`.
    pub fn d1(&self, z: &BigComplex) -> Result<BigComplex> {
        off_interval(z, "d1n")?;
        let wp = self.wp();
        let zw = z.with_prec(wp);
        let (xr, yi) = zw.to_c64();
        let (xc, w) = (xr.abs(), yi.abs());
        let lower = self.scale_lower().min(w / 16.0).max(1e-150);
        let mut br = self.lattice(if xc < w { lower } else { self.scale_lower() });
        if xc > 0.0 && xc < 1.0 && w < 0.25 {
            // Resolve the near-pole of the kernel at x = |Re z|.
            let c = zw.re.abs();
            br.push(c.clone());
            let mut h = w;
            while h < 1.0 {
                for p in [&c - h, &c + h] {
                    if p > 0.0 && p < 1.0 {
                        br.push(p);
                    }
                }
                h *= 4.0;
            }
            br.sort_by(|a, b| a.partial_cmp(b).unwrap());
            br.dedup();
        }
        let z2 = zw.square();
        let v: BigComplex = self.integrate(&br, |b, node| {
            let t = self.node_term(b, node)?;
            let den = z2.add_real(&-node.x.square());
            Ok(den.recip().scale(&t))
        })?;
        let coef = (sqrt_z2m1(&zw) * &zw) / &BigReal::pi(wp);
        Ok((coef * v).exp().with_prec(self.prec))
    }

    /// `D_{1,n}(iy)` for `y > 0`, which is real:
    /// `exp((y√(1+y²)/π) ∫_0^1 log W_n(x)/(√(1-x²)(x²+y²)) dx)`.
    pub fn d1_imag(&self, y: &BigReal) -> Result<BigReal> {
        if !y.is_sign_positive() || y.is_zero() {
            return domain("d1_imag needs y > 0");
        }
        let wp = self.wp();
        let yw = y.with_prec(wp);
        let lower = self.scale_lower().min(yw.to_f64() / 16.0);
        let br = self.lattice(lower);
        let y2 = yw.square();
        let v: BigReal = self.integrate(&br, |b, node| {
            let t = self.node_term(b, node)?;
            Ok(t / (&y2 + node.x.square()))
        })?;
        let coef = &yw * (&y2 + 1.0).sqrt() / BigReal::pi(wp);
        Ok((coef * v).exp().with_prec(self.prec))
    }
}

/// `D_{1,n}(z)` with a fresh context.
pub fn d1n(z: &BigComplex, n: usize, nu: &BigReal, prec: u32) -> Result<BigComplex> {
    SzegoContext::new(n, nu, prec).d1(z)
}

/// `D_{∞,n}` with a fresh context.
pub fn d_infty_n(n: usize, nu: &BigReal, prec: u32) -> Result<BigReal> {
    SzegoContext::new(n, nu, prec).d_infty()
}

/// Outer formula: `e^{ng} (z(z+s)/(2(z²-1)))^{1/4} ((s-i)/(s+i))^{-ν/4}`, `s = (z²-1)^{1/2}`.
pub fn outer_eval(z: &BigComplex, n: usize, nu: &BigReal, prec: u32) -> Result<AsymptoticPrediction> {
    off_interval(z, "outer_eval")?;
    let ctx = EquilibriumContext::new(prec);
    let wp = prec + GUARD_BITS;
    let zw = z.with_prec(wp);
    let g = g_fn(&zw, &ctx)?.with_prec(wp);
    let s = sqrt_z2m1(&zw);
    let f = &zw + &s;
    let q = (&zw * &f) / (s.square().mul_pow2(1));
    let pre = q.powf(&BigReal::from_f64(0.25, wp));
    let d2inv = d2_ratio(&zw).powf(&-nu.with_prec(wp).mul_pow2(-2));
    let e = g.scale(&BigReal::from_i64(n as i64, wp)).exp();
    Ok(AsymptoticPrediction {
        value: (e * pre * d2inv).with_prec(prec),
        error_scale: epsilon_n(n, &nu.with_prec(prec)),
        regime: Regime::Outer,
        inner: None,
    })
}

/// `3 log n / n + ε_n`, the width used for the inner formula.
pub fn inner_error_scale(n: usize, nu: &BigReal) -> BigReal {
    let p = nu.prec();
    let nb = BigReal::from_i64(n as i64, p);
    nb.ln().mul_i64(3) / nb + epsilon_n(n, nu)
}

fn inner_right(z: &BigComplex, n: usize, nu: &BigReal, wp: u32) -> Result<InnerParts> {
    let one = BigComplex::one(wp);
    let pi = BigReal::pi(wp);
    let nb = BigReal::from_i64(n as i64, wp);
    let nu = nu.with_prec(wp);
    let quarter = BigReal::from_f64(0.25, wp);
    let num = z.powf(&quarter)
        * BigComplex::cis(&(&pi * &nu).mul_pow2(-2))
        * z.scale(&(&pi * &nb).mul_pow2(-1)).exp();
    // (2e)^n = exp(n (1 + log 2)).
    let two_e_n = ((BigReal::ln2(wp) + 1.0) * &nb).exp();
    let den = (&one - z.square()).powf(&quarter).scale(&(BigReal::from_i64(2, wp).powf(&quarter) * two_e_n));
    let prefactor = num / den;
    let psi = psi_complex(z)?;
    let theta = theta_n(z, n)?;
    let a = psi.scale(&(&pi * &nu).mul_pow2(-1)) + theta.mul_i();
    Ok(InnerParts {
        prefactor,
        term1: a.exp(),
        term2: (-a).exp(),
    })
}

/// Inner formula on `Re z > 0`; for `Re z < 0` the reflection
/// `P̃_n(-z̄) = (-1)^n conj P̃_n(z)` is applied.
pub fn inner_eval(z: &BigComplex, n: usize, nu: &BigReal, prec: u32) -> Result<AsymptoticPrediction> {
    if z.re.is_zero() {
        return domain("inner_eval needs Re z != 0");
    }
    let wp = prec + GUARD_BITS;
    let reflect = z.re.is_sign_negative();
    let zr = if reflect { -z.conj() } else { z.clone() }.with_prec(wp);
    let mut parts = inner_right(&zr, n, nu, wp)?;
    if reflect {
        let pref = parts.prefactor.conj();
        parts = InnerParts {
            prefactor: if n % 2 == 1 { -pref } else { pref },
            term1: parts.term1.conj(),
            term2: parts.term2.conj(),
        };
    }
    let value = &parts.prefactor * &(&parts.term1 + &parts.term2);
    Ok(AsymptoticPrediction {
        value: value.with_prec(prec),
        error_scale: inner_error_scale(n, &nu.with_prec(prec)),
        regime: Regime::Inner,
        inner: Some(InnerParts {
            prefactor: parts.prefactor.with_prec(prec),
            term1: parts.term1.with_prec(prec),
            term2: parts.term2.with_prec(prec),
        }),
    })
}

/// `|Re(νπψ(z)/2) - Im θ_n(z)|`, small at zeros of `P̃_n` near the interval.
pub fn zero_condition_defect(z: &BigComplex, n: usize, nu: &BigReal) -> Result<BigReal> {
    let p = z.prec();
    let zr = if z.re.is_sign_negative() { -z.conj() } else { z.clone() };
    let psi = psi_complex(&zr)?;
    let theta = theta_n(&zr, n)?;
    let half = (BigReal::pi(p) * nu).mul_pow2(-1);
    Ok((&psi.re * &half - &theta.im).abs())
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: u32 = 128;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::from_f64(re, im, P)
    }

    fn r(x: f64) -> BigReal {
        BigReal::from_f64(x, P)
    }

    #[test]
    fn weight_half_order_closed_form() {
        // At ν = 1/2, K e^{nπx} = (2nx)^{-1/2}, so W_n = √(2n)(2nx)^{-1/2} = x^{-1/2}.
        let w = w_weight(&c(0.3, 0.0), 10, &r(0.5), P).unwrap();
        let bare = w.scale(&BigReal::from_i64(20, P).sqrt().recip());
        let want = (r(0.3) * 20.0).sqrt().recip();
        assert!(bare.dist(&BigComplex::from_real(want)) < 1e-35);
        assert!(w.dist(&BigComplex::from_real(r(0.3).sqrt().recip())) < 1e-35);
        let wm = w_weight(&c(-0.3, 0.0), 10, &r(0.5), P).unwrap();
        assert!(w.dist(&wm) < 1e-35);
        let big = w_weight(&c(0.5, 0.0), 100, &r(0.25), P).unwrap();
        let eta = (big.re * BigReal::from_f64(0.5, P).sqrt() - 1.0).abs().to_f64();
        assert!(eta <= 2.0 / 50.0);
        assert!(w_weight(&c(0.0, 0.3), 10, &r(0.5), P).is_err());
    }

    #[test]
    fn log_w_matches_complex_weight() {
        let a = log_w_real(&r(0.37), 12, &r(0.25), P).unwrap();
        let b = w_weight(&c(0.37, 0.0), 12, &r(0.25), P).unwrap().re.ln();
        assert!((a - b).abs() < 1e-30);
    }

    #[test]
    fn szego_power_values() {
        assert!(szego_power(&c(2.0, 1.0), &r(0.0)).unwrap().dist(&BigComplex::one(P)) < 1e-35);
        let v = szego_power(&c(2.0, 0.0), &r(-0.5)).unwrap();
        let s3 = BigReal::from_i64(3, P).sqrt();
        let want = (BigReal::from_i64(2, P) / (s3 + 2.0)).powf(&r(-0.25));
        assert!(v.dist(&BigComplex::from_real(want)) < 1e-35);
        let far = szego_power(&c(0.0, 1e12), &r(-0.5)).unwrap();
        assert!((far.re - BigReal::from_i64(2, P).powf(&r(0.25))).abs() < 1e-10);
    }

    #[test]
    fn d2_limits_and_jump() {
        let nu = r(0.25);
        assert!(d2(&c(1e15, 1e15), &nu).unwrap().dist(&BigComplex::one(P)) < 1e-14);
        let quarter = BigReal::pi(P) * &nu / 4.0;
        let eps = BigReal::exp2i(-100, P);
        let near1 = d2(&BigComplex::from_real(&eps + 1.0), &nu).unwrap();
        assert!(near1.dist(&BigComplex::cis(&-quarter.clone())) < 1e-10);
        let near_m1 = d2(&BigComplex::from_real(-(&eps + 1.0)), &nu).unwrap();
        assert!(near_m1.dist(&BigComplex::cis(&quarter)) < 1e-10);
        let tiny = 1e-30;
        let prod = d2(&c(0.5, tiny), &nu).unwrap() * d2(&c(0.5, -tiny), &nu).unwrap();
        let want = BigComplex::cis(&-(BigReal::pi(P) * &nu).mul_pow2(-1));
        assert!(prod.dist(&want) < 1e-25);
        for x in [1.5, -1.5, 3.0, -3.0] {
            assert!((d2(&c(x, 0.0), &nu).unwrap().abs() - 1.0).abs() < 1e-35);
        }
    }

    #[test]
    fn d2_psi_relation_all_quadrants() {
        let nu = r(0.25);
        let tol = 2f64.powi(-(P as i32) / 2);
        for (x, y) in [(0.5, 0.2), (0.5, -0.2), (-0.5, 0.2), (-0.5, -0.2), (1.7, 0.9), (-0.1, -3.0)] {
            let d = d2_psi_consistency(&c(x, y), &nu).unwrap();
            assert!(d < tol, "({x},{y}) {d:?}");
        }
        let a = d2_psi_consistency(&c(0.3, 0.4), &nu).unwrap();
        let b = d2_psi_consistency(&c(0.3, -0.4), &nu).unwrap();
        assert!((a - b).abs() < tol);
    }

    #[test]
    fn n0_identities() {
        let m = n0_matrix(&c(2.0, 0.0)).unwrap();
        assert!(det2(&m).dist(&BigComplex::one(P)) < 2f64.powi(-(P as i32) + 20));
        let far = n0_matrix(&c(1e6, 0.0)).unwrap();
        assert!(far[0][0].dist(&BigComplex::one(P)) < 1e-5);
        assert!(far[0][1].abs() < 1e-5);
        for (x, y) in [(2.0, 0.5), (-0.3, 0.2), (0.1, -2.0), (-3.0, -1.0)] {
            let a = n0_matrix(&c(x, y)).unwrap();
            let b = n0_matrix_f_form(&c(x, y)).unwrap();
            for i in 0..2 {
                for j in 0..2 {
                    assert!(a[i][j].dist(&b[i][j]) < 1e-30, "({x},{y})");
                }
            }
        }
        let t = 1e-30;
        let up = n0_matrix(&c(0.3, t)).unwrap();
        let dn = n0_matrix(&c(0.3, -t)).unwrap();
        // N₋ [[0,1],[-1,0]] = [[-N₋12, N₋11], [-N₋22, N₋21]].
        let want = [[-dn[0][1].clone(), dn[0][0].clone()], [-dn[1][1].clone(), dn[1][0].clone()]];
        for i in 0..2 {
            for j in 0..2 {
                assert!(up[i][j].dist(&want[i][j]) < 1e-10);
            }
        }
    }

    #[test]
    fn cache_is_bit_identical() {
        let nu = r(0.25);
        let cached = SzegoContext::new(12, &nu, 96);
        let plain = SzegoContext::uncached(12, &nu, 96);
        for z in [c(0.0, 0.3), c(1.5, 0.4), c(0.0, 0.05)] {
            let a = cached.d1(&z).unwrap();
            let a2 = cached.d1(&z).unwrap();
            let b = plain.d1(&z).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, a2);
        }
        assert!(cached.cache_len() > 0);
        assert_eq!(plain.cache_len(), 0);
        assert_eq!(cached.d_infty().unwrap(), plain.d_infty().unwrap());
    }

    #[test]
    fn d1_imaginary_axis_matches_general_path() {
        let ctx = SzegoContext::new(10, &r(0.25), 96);
        for y in [0.02, 0.3, 2.0] {
            let a = ctx.d1_imag(&BigReal::from_f64(y, 96)).unwrap();
            let b = ctx.d1(&BigComplex::from_f64(0.0, y, 96)).unwrap();
            assert!(b.im.abs() < 1e-20);
            assert!(((&b.re - &a) / &a).abs() < 1e-20, "y={y}");
            let lo = ctx.d1(&BigComplex::from_f64(0.0, -y, 96)).unwrap();
            assert!(((lo.re - &a) / &a).abs() < 1e-20);
        }
    }

    #[test]
    fn inner_reflection_and_nu_zero_bracket() {
        let nu = r(0.25);
        let a = inner_eval(&c(0.4, -0.02), 20, &nu, P).unwrap();
        let b = inner_eval(&c(-0.4, -0.02), 20, &nu, P).unwrap();
        assert!(a.value.conj().dist(&b.value) < 1e-30);
        // Odd n flips the sign, as the polynomial itself does.
        let pt = crate::moments::rescale_to_tilde(&crate::moments::monic_op(9, &nu, P + 64).unwrap());
        for z in [c(0.5, 0.01), c(-0.5, 0.01)] {
            let pred = inner_eval(&z, 9, &nu, P).unwrap();
            let act = pt.eval(&z.with_prec(pt.prec())).with_prec(P);
            let scale = pred.inner.unwrap().prefactor.abs();
            assert!((act.dist(&pred.value) / scale).to_f64() < 0.5);
        }
        let z0 = inner_eval(&c(0.6, 0.0), 20, &r(0.0), P).unwrap();
        let parts = z0.inner.unwrap();
        let bracket = &parts.term1 + &parts.term2;
        let theta = theta_n(&c(0.6, 0.0), 20).unwrap();
        assert!(bracket.dist(&BigComplex::from_real(theta.re.cos().mul_pow2(1))) < 1e-30);
    }

    #[test]
    fn zero_condition_examples() {
        let d = zero_condition_defect(&c(0.6, 0.0), 20, &r(0.0)).unwrap();
        assert!(d < 1e-30);
        for k in 1..=10 {
            let x = 0.08 * k as f64;
            let d = zero_condition_defect(&c(x, 0.05), 32, &r(0.25)).unwrap();
            assert!(d > 0.1, "x={x}");
        }
    }
}
