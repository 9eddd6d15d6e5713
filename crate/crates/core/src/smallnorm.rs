//! Small-norm quantities near the origin: the jump entries `j₁`, `j₂` on the
//! imaginary axis, Bessel ratio shapes, pointwise `η` bounds and the `K₁`/`K₂`
//! norm integrals.

use std::collections::HashMap;
use std::sync::Mutex;

use rug::Integer;
use serde::Serialize;

use crate::equilibrium::re_phi_imag_axis;
use crate::error::{domain, Error, Result};
use crate::mpfun::{bessel_jy, BigComplex, BigReal, GUARD_BITS};
use crate::parametrix::{d2, SzegoContext};
use crate::quad::{Node, Quad};

/// Smooth cut-off on the imaginary axis: `1` for `|y| ≤ ε`, `0` for `|y| ≥ 2ε`,
/// with an `exp(-1/t)` smoothstep in between.
#[derive(Clone, Debug)]
pub struct CutoffChi {
    pub eps: BigReal,
    pub rho: BigReal,
}

impl CutoffChi {
    pub const PROFILE_ID: &'static str = "exp-inv-smoothstep";

    pub fn new(eps: BigReal, rho: BigReal) -> Result<Self> {
        let e = eps.to_f64();
        let limit = (0.5 / std::f64::consts::E).min(rho.to_f64() / 3.0);
        if !(e > 0.0 && e < limit) {
            return Err(Error::InvalidInput(format!(
                "cut-off eps = {e} must lie in (0, {limit})"
            )));
        }
        Ok(CutoffChi { eps, rho })
    }

    /// `ε = 0.12`, `ρ = 0.4`.
    pub fn standard(prec: u32) -> Self {
        CutoffChi {
            eps: BigReal::from_ratio(3, 25, prec),
            rho: BigReal::from_ratio(2, 5, prec),
        }
    }

    /// `χ(iy)`, depending only on `|y|`.
    pub fn value(&self, y: &BigReal) -> BigReal {
        let p = y.prec().max(self.eps.prec());
        let a = y.abs().with_prec(p);
        if a <= self.eps {
            return BigReal::one(p);
        }
        if a >= self.eps.mul_pow2(1) {
            return BigReal::zero(p);
        }
        let t = (&a - &self.eps) / &self.eps;
        let h = |u: &BigReal| (-u.recip()).exp();
        let up = h(&t);
        let down = h(&(-&t + 1.0));
        &down / (&up + &down)
    }

    pub fn support_end(&self) -> BigReal {
        self.eps.mul_pow2(1)
    }
}

struct JParts {
    /// `4 e^{-2n Re φ} / (√(2n) π)`, as the jump definition gives it.
    pref: BigReal,
    j: BigReal,
    y: BigReal,
    cos: BigReal,
    sin: BigReal,
}

fn j_parts(y: &BigReal, n: usize, nu: &BigReal) -> Result<JParts> {
    if !y.is_sign_positive() || y.is_zero() || !y.is_finite() {
        return domain("j1/j2 need y > 0");
    }
    if n == 0 {
        return domain("j1/j2 need n >= 1");
    }
    let p = y.prec();
    let wp = p + GUARD_BITS;
    let yw = y.with_prec(wp);
    let nn = BigReal::from_i64(n as i64, wp);
    let pi = BigReal::pi(wp);
    let (j, yv) = bessel_jy(nu, &(&nn * &pi * &yw), wp)?;
    let re_phi = re_phi_imag_axis(&yw)?;
    let pref = (-(re_phi * &nn).mul_pow2(1)).exp().mul_pow2(2) / (nn.mul_pow2(1).sqrt() * &pi);
    let nupi = nu.with_prec(wp) * &pi;
    Ok(JParts {
        pref,
        j,
        y: yv,
        cos: nupi.cos(),
        sin: nupi.sin(),
    })
}

/// `|j₁(iy)|` for `y > 0`.
pub fn j1_modulus(y: &BigReal, n: usize, nu: &BigReal) -> Result<BigReal> {
    let t = j_parts(y, n, nu)?;
    let den = t.j.square() + t.y.square();
    let num = (&t.j * &t.cos - &t.y * &t.sin).abs();
    Ok((t.pref * num / den).with_prec(y.prec()))
}

/// `|j₂(-iy)|` for `y > 0`.
pub fn j2_modulus(y: &BigReal, n: usize, nu: &BigReal) -> Result<BigReal> {
    let t = j_parts(y, n, nu)?;
    let den = t.j.square() + t.y.square();
    Ok((t.pref * t.j.abs() / den).with_prec(y.prec()))
}

/// Both sides of the two Bessel ratio inequalities with unit constants.
#[derive(Clone, Debug)]
pub struct BesselRatioCheck {
    pub lhs1: BigReal,
    pub rhs1: BigReal,
    pub lhs2: BigReal,
    pub rhs2: BigReal,
}

impl BesselRatioCheck {
    pub fn ratio1(&self) -> f64 {
        (&self.lhs1 / &self.rhs1).to_f64()
    }
    pub fn ratio2(&self) -> f64 {
        (&self.lhs2 / &self.rhs2).to_f64()
    }
}

fn check_nu(nu: &BigReal) -> Result<()> {
    if !(nu.is_sign_positive() && !nu.is_zero() && *nu <= 0.5) {
        return domain("needs 0 < nu <= 1/2");
    }
    Ok(())
}

pub fn bessel_ratio_bounds_check(s: &BigReal, nu: &BigReal) -> Result<BesselRatioCheck> {
    check_nu(nu)?;
    if !s.is_sign_positive() || s.is_zero() {
        return domain("bessel ratio check needs s > 0");
    }
    let p = s.prec();
    let wp = p + GUARD_BITS;
    let sw = s.with_prec(wp);
    let nuw = nu.with_prec(wp);
    let (j, y) = bessel_jy(&nuw, &sw, wp)?;
    let m = j.square() + y.square();
    let nupi = &nuw * BigReal::pi(wp);
    let lhs1 = (&j * nupi.cos() - &y * nupi.sin()).abs() / &m;
    let lhs2 = j.abs() / &m;
    let pw = |e: BigReal| sw.powf(&e);
    let common = pw(-nuw.mul_pow2(1) + 1.0) + 1.0;
    let rhs1 = pw(nuw.clone()) * &common / (pw(-&nuw + 0.5) + 1.0);
    let rhs2 = pw(nuw.mul_i64(3)) * &common / (pw(&nuw + 0.5) + 1.0);
    Ok(BesselRatioCheck {
        lhs1: lhs1.with_prec(p),
        rhs1: rhs1.with_prec(p),
        lhs2: lhs2.with_prec(p),
        rhs2: rhs2.with_prec(p),
    })
}

/// `|η₁(iy)|`, `|η₂(-iy)|` and the raw bound shapes (unit constants).
#[derive(Clone, Debug)]
pub struct EtaCheck {
    pub eta1_mod: BigReal,
    /// `y^ν e^{-2n Re φ(iy)}`.
    pub bound1: BigReal,
    pub eta2_mod: BigReal,
    /// `(n^{2ν} y^ν + n y^{1-ν}) e^{-2n Re φ(iy)}`.
    pub bound2: BigReal,
    /// `|D₁(iy)|²`.
    pub d1_sq: BigReal,
    /// `n^{1/2-ν} y^{-ν} / (1 + (ny)^{1/2-ν})`.
    pub d1_shape: BigReal,
}

/// `|D₂(iy)|²` and `|D₂(-iy)|²`.
fn d2_sq_pair(y: &BigReal, nu: &BigReal) -> Result<(BigReal, BigReal)> {
    let p = y.prec();
    let up = BigComplex::new(BigReal::zero(p), y.clone());
    let down = BigComplex::new(BigReal::zero(p), -y);
    Ok((d2(&up, nu)?.norm_sqr(), d2(&down, nu)?.norm_sqr()))
}

pub fn eta_bound_check(y: &BigReal, n: usize, nu: &BigReal, chi: &CutoffChi) -> Result<EtaCheck> {
    let ctx = SzegoContext::new(n, nu, y.prec());
    eta_bound_check_with(&ctx, y, chi)
}

/// As [`eta_bound_check`], reusing the Szegő memo of `ctx`.
pub fn eta_bound_check_with(ctx: &SzegoContext, y: &BigReal, chi: &CutoffChi) -> Result<EtaCheck> {
    if !y.is_sign_positive() || y.is_zero() || *y > chi.rho {
        return domain("eta bounds need 0 < y <= rho");
    }
    let n = ctx.n;
    let nu = &ctx.nu;
    let p = y.prec();
    let wp = p + GUARD_BITS;
    let yw = y.with_prec(wp);
    let nn = BigReal::from_i64(n as i64, wp);
    let decay = (-(re_phi_imag_axis(&yw)? * &nn).mul_pow2(1)).exp();
    let y_nu = yw.powf(nu);
    let bound1 = &y_nu * &decay;
    let bound2 = (nn.powf(&nu.mul_pow2(1)) * &y_nu + &nn * yw.powf(&(-nu + 1.0))) * &decay;
    let d1_sq = ctx.d1_imag(y)?.with_prec(wp).square();
    let half_m = -nu + 0.5;
    let d1_shape = nn.powf(&half_m) / &y_nu / ((&nn * &yw).powf(&half_m) + 1.0);
    let c = chi.value(&yw);
    let (eta1_mod, eta2_mod) = if c.is_zero() {
        (BigReal::zero(wp), BigReal::zero(wp))
    } else {
        let (up, down) = d2_sq_pair(&yw, nu)?;
        let e1 = j1_modulus(&yw, n, nu)? * &d1_sq * up * &c;
        let e2 = j2_modulus(&yw, n, nu)? * &d1_sq * down * &c;
        (e1, e2)
    };
    Ok(EtaCheck {
        eta1_mod: eta1_mod.with_prec(p),
        bound1: bound1.with_prec(p),
        eta2_mod: eta2_mod.with_prec(p),
        bound2: bound2.with_prec(p),
        d1_sq: d1_sq.with_prec(p),
        d1_shape: d1_shape.with_prec(p),
    })
}

/// `‖K₁‖`, `‖K₂‖` majorants `(∫_0^{2ε} |η(±iy)|² dy/y)^{1/2}` and their product.
#[derive(Clone, Debug, Serialize)]
pub struct KNormBounds {
    pub n: usize,
    pub k1_bound: f64,
    pub k2_bound: f64,
    pub product: f64,
    /// Share of each integral carried by the power-law tail below `y_min`.
    pub tail_fraction: (f64, f64),
}

/// Both `η` moduli at `y`, memoized so the two integrals share evaluations.
struct EtaMemo<'a> {
    ctx: &'a SzegoContext,
    chi: &'a CutoffChi,
    prec: u32,
    memo: Mutex<HashMap<(Integer, i32), (BigReal, BigReal)>>,
}

impl EtaMemo<'_> {
    fn get(&self, y: &BigReal) -> Result<(BigReal, BigReal)> {
        let key = y.as_float().to_integer_exp();
        if let Some(k) = &key {
            if let Some(v) = self.memo.lock().unwrap_or_else(|e| e.into_inner()).get(k) {
                return Ok(v.clone());
            }
        }
        let e = eta_bound_check_with(self.ctx, &y.with_prec(self.prec), self.chi)?;
        let v = (e.eta1_mod.square(), e.eta2_mod.square());
        if let Some(k) = key {
            self.memo.lock().unwrap_or_else(|e| e.into_inner()).insert(k, v.clone());
        }
        Ok(v)
    }
}

/// `∫_0^{y_min} F(y) dy/y` for `F ≈ c y^a`, with `a` read off `F(y_min)` and `F(y_min/2)`.
fn power_tail(f_lo: &BigReal, f_half: &BigReal) -> Result<BigReal> {
    if f_lo.is_zero() {
        return Ok(f_lo.clone());
    }
    let a = (f_lo / f_half).log2();
    if !(a > 0.0) {
        return Err(Error::Quadrature {
            estimate: a.to_f64(),
            target: 0.0,
        });
    }
    Ok(f_lo / &a)
}

/// Majorants of the `K₁`, `K₂` operator norms at `(n, ν)`.
///
/// `[y_min, 2ε]` is split geometrically (ratio 2) and integrated by tanh-sinh with
/// target `2^{-0.3 prec}`; below `y_min = 2^{-24}/n` the integrand is a power law.
pub fn k_norm_bounds(n: usize, nu: &BigReal, chi: &CutoffChi, prec: u32) -> Result<KNormBounds> {
    check_nu(nu)?;
    if n < 2 {
        return domain("k_norm_bounds needs n >= 2");
    }
    let tol = -0.3 * f64::from(prec);
    let ctx = SzegoContext::new(n, nu, prec).with_tol_log2(tol);
    let memo = EtaMemo {
        ctx: &ctx,
        chi,
        prec,
        memo: Mutex::new(HashMap::new()),
    };
    let quad = Quad::new(prec + GUARD_BITS / 2).with_tol_log2(tol);
    let wp = quad.prec;
    let lg = (n as f64).log2().ceil() as i32;
    let y_min = BigReal::exp2i(-24 - lg, wp);
    let top = chi.support_end().with_prec(wp);
    let mut breaks = vec![y_min.clone()];
    let mut b = y_min.mul_pow2(1);
    while b < chi.eps {
        breaks.push(b.clone());
        b = b.mul_pow2(1);
    }
    breaks.push(chi.eps.with_prec(wp));
    breaks.push(top);

    let mut acc = (BigReal::zero(wp), BigReal::zero(wp));
    for w in breaks.windows(2) {
        let r1 = quad.integrate(&w[0], &w[1], |node: &Node| Ok(memo.get(&node.x)?.0 / &node.x))?;
        let r2 = quad.integrate(&w[0], &w[1], |node: &Node| Ok(memo.get(&node.x)?.1 / &node.x))?;
        acc.0 = &acc.0 + &r1.value;
        acc.1 = &acc.1 + &r2.value;
    }
    let lo = memo.get(&y_min)?;
    let half = memo.get(&y_min.mul_pow2(-1))?;
    let t1 = power_tail(&lo.0, &half.0)?;
    let t2 = power_tail(&lo.1, &half.1)?;
    let i1 = &acc.0 + &t1;
    let i2 = &acc.1 + &t2;
    let k1 = i1.sqrt();
    let k2 = i2.sqrt();
    Ok(KNormBounds {
        n,
        k1_bound: k1.to_f64(),
        k2_bound: k2.to_f64(),
        product: (&k1 * &k2).to_f64(),
        tail_fraction: ((&t1 / &i1).to_f64(), (&t2 / &i2).to_f64()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mpfun::{bessel_k_complex, gamma_fn};

    fn r(x: f64) -> BigReal {
        BigReal::from_f64(x, 128)
    }

    #[test]
    fn chi_partition() {
        let chi = CutoffChi::standard(128);
        assert_eq!(chi.value(&r(0.05)), 1.0);
        assert_eq!(chi.value(&r(0.12)), 1.0);
        assert_eq!(chi.value(&r(0.24)), 0.0);
        assert_eq!(chi.value(&r(0.3)), 0.0);
        let mid = chi.value(&chi.eps.mul_f64(1.5)).to_f64();
        assert!((mid - 0.5).abs() < 1e-30);
        let mut last = 1.0;
        for k in 1..100 {
            let v = chi.value(&r(0.12 + 0.12 * k as f64 / 100.0)).to_f64();
            assert!(v <= last && (0.0..=1.0).contains(&v));
            last = v;
        }
    }

    #[test]
    fn chi_rejects_large_eps() {
        assert!(CutoffChi::new(r(0.2), r(0.4)).is_err());
        assert!(CutoffChi::new(r(0.14), r(0.4)).is_err());
        assert!(CutoffChi::new(r(0.12), r(0.4)).is_ok());
    }

    /// `j₁` straight from its definition with `K_ν` at imaginary arguments.
    fn j1_direct(y: f64, n: usize, nu: f64) -> f64 {
        let p = 160;
        let nn = n as i64;
        let nub = r(nu).with_prec(p);
        let pi = BigReal::pi(p);
        // Boundary values from just right (minus side) and just left (plus side).
        let off = BigReal::exp2i(-140, p);
        let scale = &pi * BigReal::from_i64(nn, p);
        let right = BigComplex::new(off.clone(), r(y).with_prec(p)).scale(&scale);
        let left = BigComplex::new(off, -r(y).with_prec(p)).scale(&scale);
        let root = BigReal::from_i64(2 * nn, p).sqrt();
        let w_minus = (bessel_k_complex(&nub, &right, p).unwrap() * right.exp()).scale(&root);
        let w_plus = (bessel_k_complex(&nub, &left, p).unwrap() * left.exp()).scale(&root);
        let ctx = crate::equilibrium::EquilibriumContext::new(p);
        let yb = r(y).with_prec(p);
        let phi_p = crate::equilibrium::phi_imag_axis(&yb, crate::equilibrium::Side::Plus, &ctx).unwrap();
        let phi_m = crate::equilibrium::phi_imag_axis(&yb, crate::equilibrium::Side::Minus, &ctx).unwrap();
        let two_n = BigReal::from_i64(-2 * nn, p);
        let half = (&nub * &pi).mul_pow2(-1);
        let term_m = BigComplex::cis(&half) * phi_m.scale(&two_n).exp() / &w_minus;
        let term_p = BigComplex::cis(&-half) * phi_p.scale(&two_n).exp() / &w_plus;
        (&term_m - &term_p).abs().to_f64()
    }

    #[test]
    fn j1_matches_definition() {
        for &(y, n, nu) in &[(0.05, 8, 0.25), (0.2, 16, 0.25), (0.1, 12, 0.5), (0.03, 20, 0.1)] {
            let closed = j1_modulus(&r(y), n, &r(nu)).unwrap().to_f64();
            let direct = j1_direct(y, n, nu);
            assert!(((closed - direct) / direct).abs() < 1e-25, "{y} {n} {nu}: {closed} vs {direct}");
        }
    }

    #[test]
    fn half_integer_elementary() {
        // J_{1/2}(s) = √(2/(πs)) sin s and Y_{1/2}(s) = -√(2/(πs)) cos s.
        let (y, n) = (0.07f64, 24usize);
        let s = n as f64 * std::f64::consts::PI * y;
        let rephi = -y * y.ln() + y * (1.0 + (1.0 + y * y).sqrt()).ln() + y.asinh();
        let e = (-2.0 * n as f64 * rephi).exp();
        let want1 = 2.0 * e / (2.0 * n as f64).sqrt() * (2.0 * s / std::f64::consts::PI).sqrt() * s.cos().abs();
        let want2 = 2.0 * e / (2.0 * n as f64).sqrt() * (2.0 * s / std::f64::consts::PI).sqrt() * s.sin().abs();
        let got1 = j1_modulus(&r(y), n, &r(0.5)).unwrap().to_f64();
        let got2 = j2_modulus(&r(y), n, &r(0.5)).unwrap().to_f64();
        assert!((got1 / want1 - 1.0).abs() < 1e-12);
        assert!((got2 / want2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn moduli_decay_in_y() {
        let nu = r(0.25);
        let a: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&y| j1_modulus(&r(y), 10, &nu).unwrap().to_f64())
            .collect();
        assert!(a[0] > a[1] && a[1] > a[2]);
        let b: Vec<f64> = [1.0, 2.0, 4.0]
            .iter()
            .map(|&y| j2_modulus(&r(y), 10, &nu).unwrap().to_f64())
            .collect();
        assert!(b[0] > b[1] && b[1] > b[2]);
    }

    #[test]
    fn moduli_coincide_as_nu_vanishes() {
        let nu = BigReal::exp2i(-200, 128);
        let a = j1_modulus(&r(0.3), 6, &nu).unwrap();
        let b = j2_modulus(&r(0.3), 6, &nu).unwrap();
        assert!(((&a - &b) / &a).abs().to_f64() < 1e-30);
    }

    #[test]
    fn ratio_small_s_limit() {
        // lhs1/shape1 -> π sin(νπ) / (2^ν Γ(ν)) and lhs2/shape2 -> π² / (8^ν Γ(ν)² Γ(ν+1)).
        let nu = 0.25;
        let c = bessel_ratio_bounds_check(&r(1e-40), &r(nu)).unwrap();
        let g = gamma_fn(&r(nu), 128).unwrap().to_f64();
        let pi = std::f64::consts::PI;
        let want1 = pi * (nu * pi).sin() / (2f64.powf(nu) * g);
        let want2 = pi * pi / (8f64.powf(nu) * g * g * g * nu);
        assert!((c.ratio1() / want1 - 1.0).abs() < 1e-8, "{} {}", c.ratio1(), want1);
        assert!((c.ratio2() / want2 - 1.0).abs() < 1e-8, "{} {}", c.ratio2(), want2);
    }

    #[test]
    fn ratio_plateau() {
        let nu = r(0.25);
        let a = bessel_ratio_bounds_check(&r(100.0), &nu).unwrap().ratio1();
        let b = bessel_ratio_bounds_check(&r(1000.0), &nu).unwrap().ratio1();
        assert!(b <= 3.0 * a.max(0.1) && a <= 3.0 * b.max(0.1));
        assert!(b < (std::f64::consts::PI / 2.0).sqrt() * 1.01);
    }

    #[test]
    fn eta_vanishes_beyond_cutoff() {
        let chi = CutoffChi::standard(96);
        let e = eta_bound_check(&BigReal::from_f64(0.3, 96), 8, &BigReal::from_f64(0.25, 96), &chi).unwrap();
        assert!(e.eta1_mod.is_zero() && e.eta2_mod.is_zero());
        assert!(!e.bound1.is_zero());
    }
}
