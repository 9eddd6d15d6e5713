//! The equilibrium measure `ψ` of `[-1, 1]` in the external field `π|x|`, with the
//! associated `g`, `φ` and `θ_n` functions.
//!
//! Integrals against `ψ` use tanh-sinh on pieces split at `0` (the log singularity)
//! and at any point where the other factor is singular.

use crate::error::{domain, Error, Result};
use crate::exec::Exec;
use crate::mpfun::{BigComplex, BigReal, GUARD_BITS};
use crate::quad::{Node, Quad, QuadValue};

/// Which boundary value to take across a cut.
///
/// On the real axis `Plus` is the limit from `Im z > 0`. On the imaginary axis,
/// oriented upward, `Plus` is the limit from the left half-plane.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
}

/// Precision and quadrature settings shared by the evaluators.
#[derive(Clone, Debug)]
pub struct EquilibriumContext {
    pub prec: u32,
    pub quad: Quad,
}

impl EquilibriumContext {
    pub fn new(prec: u32) -> Self {
        EquilibriumContext {
            prec,
            quad: Quad::new(prec + GUARD_BITS / 2),
        }
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.quad = self.quad.with_exec(exec);
        self
    }

    fn wp(&self) -> u32 {
        self.quad.prec
    }

    /// `log2` of the quadrature target relative to `Σ|w f|`; never above `-prec/4`.
    pub fn target_log2(&self) -> f64 {
        self.quad.tol_log2.min(-f64::from(self.prec) / 4.0)
    }

    /// Σ over consecutive breakpoints, with the piece ends visible to the integrand.
    fn pieces<T, F>(&self, breaks: &[BigReal], f: F) -> Result<T>
    where
        T: QuadValue,
        F: Fn(&BigReal, &BigReal, &Node) -> Result<T> + Sync + Send,
    {
        let mut acc = T::zero_like(self.wp());
        for w in breaks.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let (a, b) = (&w[0], &w[1]);
            let r = self.quad.integrate(a, b, |node: &Node| f(a, b, node))?;
            acc = acc.plus(&r.value);
        }
        Ok(acc)
    }
}

fn check_open_unit(x: &BigReal) -> Result<()> {
    if !x.is_finite() || x.is_zero() || x.abs() > 1.0 {
        return domain("psi_real needs 0 < |x| <= 1");
    }
    Ok(())
}

/// `πψ` from `|x|` and `1 - |x|`, the latter supplied separately for accuracy.
fn pi_psi_parts(ax: &BigReal, one_minus: &BigReal) -> BigReal {
    let s = (one_minus * (ax + 1.0)).sqrt();
    ((s + 1.0) / ax).ln()
}

/// `ψ(x) = (1/π) log((1 + √(1-x²)) / |x|)` for `0 < |x| <= 1`.
pub fn psi_real(x: &BigReal) -> Result<BigReal> {
    check_open_unit(x)?;
    let p = x.prec();
    let wp = p + GUARD_BITS;
    let ax = x.abs().with_prec(wp);
    let om = BigReal::one(wp) - &ax;
    Ok((pi_psi_parts(&ax, &om) / BigReal::pi(wp)).with_prec(p))
}

/// `πψ(z)` with `1 - z` given separately.
fn pi_psi_complex_parts(z: &BigComplex, one_minus: &BigComplex) -> BigComplex {
    let p = z.prec();
    let s = one_minus.sqrt() * z.add_real(&BigReal::one(p)).sqrt();
    (s.add_real(&BigReal::one(p)) / z).ln()
}

fn check_right_half(z: &BigComplex) -> Result<()> {
    if !z.is_finite() || !z.re.is_sign_positive() || z.re.is_zero() {
        return domain("needs Re z > 0");
    }
    if z.im.is_zero() && z.re >= 1.0 {
        return domain("z on the cut [1, inf)");
    }
    Ok(())
}

/// Analytic continuation of `ψ` to `Re z > 0` off `[1, ∞)`, principal branches.
pub fn psi_complex(z: &BigComplex) -> Result<BigComplex> {
    check_right_half(z)?;
    let p = z.prec();
    let wp = p + GUARD_BITS;
    let zw = z.with_prec(wp);
    let om = BigComplex::one(wp) - &zw;
    Ok((pi_psi_complex_parts(&zw, &om) / &BigReal::pi(wp)).with_prec(p))
}

/// `ψ(z)` on `ℂ \ (iℝ ∪ (-∞,-1] ∪ [1,∞))`, extended to `Re z < 0` as `ψ(-z)`.
pub fn psi_even(z: &BigComplex) -> Result<BigComplex> {
    if z.re.is_sign_negative() && !z.re.is_zero() {
        psi_complex(&-z.clone())
    } else {
        psi_complex(z)
    }
}

/// `∫_{-1}^x ψ` in closed form: `∫_0^x πψ = x πψ(x) + arcsin x`.
pub fn psi_cdf(x: &BigReal) -> BigReal {
    let p = x.prec();
    if *x <= -1.0 {
        return BigReal::zero(p);
    }
    if *x >= 1.0 {
        return BigReal::one(p);
    }
    let half = BigReal::from_f64(0.5, p);
    if x.is_zero() {
        return half;
    }
    let wp = p + GUARD_BITS;
    let ax = x.abs().with_prec(wp);
    let om = BigReal::one(wp) - &ax;
    let part = (&ax * pi_psi_parts(&ax, &om) + ax.asin()) / BigReal::pi(wp);
    let v = if x.is_sign_negative() {
        half.with_prec(wp) - part
    } else {
        half.with_prec(wp) + part
    };
    v.with_prec(p)
}

/// `1 - |t|` at a node of the piece `[a, b] ⊂ [-1, 1]`.
fn one_minus_abs(a: &BigReal, b: &BigReal, node: &Node) -> BigReal {
    if node.x.is_sign_negative() {
        if *a == -1.0 {
            node.from_a.clone()
        } else {
            &node.x + 1.0
        }
    } else if *b == 1.0 {
        node.to_b.clone()
    } else {
        BigReal::one(node.x.prec()) - &node.x
    }
}

fn psi_at_node(a: &BigReal, b: &BigReal, node: &Node, inv_pi: &BigReal) -> BigReal {
    let ax = node.x.abs();
    if ax.is_zero() {
        // Only reachable if a piece degenerates; the weight there is zero anyway.
        return BigReal::zero(node.x.prec());
    }
    pi_psi_parts(&ax, &one_minus_abs(a, b, node)) * inv_pi
}

/// Sorted, deduplicated breakpoints `{-1, 0, 1} ∪ extra ∩ (-1, 1)`.
fn breaks_with(extra: &[BigReal], wp: u32) -> Vec<BigReal> {
    let mut v = vec![BigReal::from_i64(-1, wp), BigReal::zero(wp), BigReal::one(wp)];
    for e in extra {
        if *e > -1.0 && *e < 1.0 && !e.is_zero() {
            v.push(e.with_prec(wp));
        }
    }
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    v.dedup();
    v
}

/// `∫_{-1}^x ψ` by quadrature, the independent route to [`psi_cdf`].
pub fn psi_cdf_quad(x: &BigReal, ctx: &EquilibriumContext) -> Result<BigReal> {
    let wp = ctx.wp();
    let lo = BigReal::from_i64(-1, wp);
    let hi = x.with_prec(wp).max_ref(&lo).clone();
    let hi = if hi > 1.0 { BigReal::one(wp) } else { hi };
    let br: Vec<BigReal> = breaks_with(std::slice::from_ref(&hi), wp)
        .into_iter()
        .filter(|b| *b <= hi)
        .collect();
    let inv_pi = BigReal::pi(wp).recip();
    let v: BigReal = ctx.pieces(&br, |a, b, node| Ok(psi_at_node(a, b, node, &inv_pi)))?;
    Ok(v.with_prec(ctx.prec))
}

/// `ℓ = -2 - 2 log 2`.
pub fn ell_const(prec: u32) -> BigReal {
    let wp = prec + GUARD_BITS;
    (BigReal::from_i64(-2, wp) - BigReal::ln2(wp).mul_pow2(1)).with_prec(prec)
}

fn on_cut(z: &BigComplex) -> bool {
    z.im.is_zero() && z.re <= 1.0
}

/// `g(z) = ∫ log(z - t) ψ(t) dt` for `z ∉ (-∞, 1]`.
pub fn g_fn(z: &BigComplex, ctx: &EquilibriumContext) -> Result<BigComplex> {
    if !z.is_finite() || on_cut(z) {
        return domain("g is analytic off (-inf, 1]");
    }
    let wp = ctx.wp();
    let zw = z.with_prec(wp);
    let br = breaks_with(std::slice::from_ref(&zw.re), wp);
    let inv_pi = BigReal::pi(wp).recip();
    let v: BigComplex = ctx.pieces(&br, |a, b, node| {
        let w = psi_at_node(a, b, node, &inv_pi);
        Ok((&zw - &BigComplex::from_real(node.x.clone())).ln().scale(&w))
    })?;
    Ok(v.with_prec(ctx.prec))
}

/// Boundary value `g_±(x)` on the real axis.
///
/// The real part is `∫ log|x - t| ψ(t) dt`; the imaginary part is `±π ∫_x^1 ψ`.
pub fn g_boundary(x: &BigReal, side: Side, ctx: &EquilibriumContext) -> Result<BigComplex> {
    if !x.is_finite() {
        return domain("g boundary value at a non-finite point");
    }
    let wp = ctx.wp();
    let xw = x.with_prec(wp);
    let br = breaks_with(std::slice::from_ref(&xw), wp);
    let inv_pi = BigReal::pi(wp).recip();
    let re: BigReal = ctx.pieces(&br, |a, b, node| {
        let w = psi_at_node(a, b, node, &inv_pi);
        let d = if *a == xw {
            node.from_a.clone()
        } else if *b == xw {
            node.to_b.clone()
        } else {
            (&xw - &node.x).abs()
        };
        Ok(d.ln() * w)
    })?;
    let im = if xw >= 1.0 {
        BigReal::zero(wp)
    } else {
        let lo = if xw <= -1.0 { BigReal::from_i64(-1, wp) } else { xw.clone() };
        let br: Vec<BigReal> = breaks_with(std::slice::from_ref(&lo), wp)
            .into_iter()
            .filter(|b| *b >= lo)
            .collect();
        let mass: BigReal = ctx.pieces(&br, |a, b, node| Ok(psi_at_node(a, b, node, &inv_pi)))?;
        mass * BigReal::pi(wp)
    };
    let im = match side {
        Side::Plus => im,
        Side::Minus => -im,
    };
    Ok(BigComplex::new(re, im).with_prec(ctx.prec))
}

/// `V(z) = πz` for `Re z > 0`, `-πz` for `Re z < 0`.
pub fn v_field(z: &BigComplex) -> Result<BigComplex> {
    if z.re.is_zero() {
        return domain("V has a jump on the imaginary axis");
    }
    let pz = z.scale(&BigReal::pi(z.prec()));
    Ok(if z.re.is_sign_negative() { -pz } else { pz })
}

/// `φ = g - V/2 - ℓ/2` off `(-∞, 1] ∪ iℝ`.
pub fn phi_fn(z: &BigComplex, ctx: &EquilibriumContext) -> Result<BigComplex> {
    if z.re.is_zero() {
        return domain("phi is not analytic on the imaginary axis");
    }
    let g = g_fn(z, ctx)?;
    let v = v_field(&z.with_prec(ctx.wp()))?;
    let half_ell = ell_const(ctx.wp()).mul_pow2(-1);
    Ok((g.with_prec(ctx.wp()) - v.mul_pow2(-1)).add_real(&-half_ell).with_prec(ctx.prec))
}

/// Boundary value `φ_±(x)` on the real axis, `x ≠ 0`.
pub fn phi_boundary(x: &BigReal, side: Side, ctx: &EquilibriumContext) -> Result<BigComplex> {
    if x.is_zero() {
        return domain("phi boundary value at 0");
    }
    let wp = ctx.wp();
    let g = g_boundary(x, side, ctx)?.with_prec(wp);
    let v = x.abs().with_prec(wp) * BigReal::pi(wp);
    let shift = v.mul_pow2(-1) + ell_const(wp).mul_pow2(-1);
    Ok(g.add_real(&-shift).with_prec(ctx.prec))
}

/// Boundary value `φ_±(iy)` on the imaginary axis, `y ≠ 0`.
pub fn phi_imag_axis(y: &BigReal, side: Side, ctx: &EquilibriumContext) -> Result<BigComplex> {
    if y.is_zero() {
        return domain("phi on the imaginary axis needs y != 0");
    }
    let wp = ctx.wp();
    let z = BigComplex::new(BigReal::zero(wp), y.with_prec(wp));
    let g = g_fn(&z, ctx)?.with_prec(wp);
    // From the left V = -πz, from the right V = πz.
    let half_v = z.scale(&BigReal::pi(wp)).mul_pow2(-1);
    let g = match side {
        Side::Plus => g + half_v,
        Side::Minus => g - half_v,
    };
    Ok(g.add_real(&-ell_const(wp).mul_pow2(-1)).with_prec(ctx.prec))
}

/// `Re φ(±is) = -s log s + s log(1 + √(1+s²)) + log(s + √(1+s²))`, `s > 0`.
pub fn re_phi_imag_axis(s: &BigReal) -> Result<BigReal> {
    if !s.is_finite() || !s.is_sign_positive() || s.is_zero() {
        return domain("re_phi_imag_axis needs s > 0");
    }
    let p = s.prec();
    let wp = p + GUARD_BITS;
    let s = s.with_prec(wp);
    let r = (s.square() + 1.0).sqrt();
    let v = -(&s * s.ln()) + &s * (r + 1.0).ln() + s.asinh();
    Ok(v.with_prec(p))
}

/// `θ_n(z) = nπ∫_z^1 ψ + (1/4) arccos z - π/4` in closed form, using
/// `π∫_z^1 ψ = arccos z - z πψ(z)`.
pub fn theta_n(z: &BigComplex, n: usize) -> Result<BigComplex> {
    let p = z.prec();
    if z.im.is_zero() && z.re == 1.0 {
        return Ok(BigComplex::from_real(-BigReal::pi(p).mul_pow2(-2)));
    }
    check_right_half(z)?;
    let wp = p + GUARD_BITS + 8;
    let zw = z.with_prec(wp);
    let om = BigComplex::one(wp) - &zw;
    let acos = zw.acos();
    let integral = &acos - &zw * pi_psi_complex_parts(&zw, &om);
    let quarter_pi = BigReal::pi(wp).mul_pow2(-2);
    let v = integral.scale(&BigReal::from_i64(n as i64, wp)) + acos.mul_pow2(-2);
    Ok(v.add_real(&-quarter_pi).with_prec(p))
}

/// `π∫_z^1 ψ(s) ds` by quadrature along the segment from `z` to `1`.
pub fn pi_psi_tail_quad(z: &BigComplex, ctx: &EquilibriumContext) -> Result<BigComplex> {
    check_right_half(z)?;
    let wp = ctx.wp();
    let zw = z.with_prec(wp);
    let len = BigComplex::one(wp) - &zw;
    let br = [BigReal::zero(wp), BigReal::one(wp)];
    let v: BigComplex = ctx.pieces(&br, |_, _, node| {
        let s = &zw + &len.scale(&node.x);
        let om = len.scale(&node.to_b);
        Ok(pi_psi_complex_parts(&s, &om))
    })?;
    Ok((v * &len).with_prec(ctx.prec))
}

/// `θ_n` with the integral term by quadrature, the cross-check of [`theta_n`].
pub fn theta_n_quad(z: &BigComplex, n: usize, ctx: &EquilibriumContext) -> Result<BigComplex> {
    let wp = ctx.wp();
    let tail = pi_psi_tail_quad(z, ctx)?.with_prec(wp);
    let acos = z.with_prec(wp).acos();
    let v = tail.scale(&BigReal::from_i64(n as i64, wp)) + acos.mul_pow2(-2);
    Ok(v.add_real(&-BigReal::pi(wp).mul_pow2(-2)).with_prec(ctx.prec))
}

/// The box `|Im z| <= 0.1`, `δ <= |Re z| <= 1 - δ` standing in for the neighborhood
/// of `(-1, 1)` where the inner asymptotics are validated.
pub fn in_validated_box(z: &BigComplex, delta: f64) -> bool {
    let (re, im) = z.to_c64();
    im.abs() <= 0.1 && re.abs() >= delta && re.abs() <= 1.0 - delta
}

/// `∫_0^{1/e} y^α e^{-4ny log(1/y)} dy`.
pub fn log_decay_integral(alpha: &BigReal, n: usize, prec: u32) -> Result<BigReal> {
    if n < 2 || alpha.is_sign_negative() {
        return Err(Error::InvalidInput("log_decay_integral needs n >= 2, alpha >= 0".into()));
    }
    let ctx = EquilibriumContext::new(prec);
    let wp = ctx.wp();
    let nf = n as f64;
    let y0 = 1.0 / (nf * nf.ln());
    let end = BigReal::from_i64(-1, wp).exp();
    let mut br = vec![BigReal::zero(wp)];
    let mut y = y0 / 64.0;
    while y < 0.3 {
        br.push(BigReal::from_f64(y, wp));
        y *= 4.0;
    }
    br.push(end);
    let a = alpha.with_prec(wp);
    let four_n = BigReal::from_i64(4 * n as i64, wp);
    let v: BigReal = ctx.pieces(&br, |_, _, node| {
        let y = &node.x;
        if y.is_zero() {
            return Ok(BigReal::zero(wp));
        }
        let ln_y = y.ln();
        Ok((&a * &ln_y + &four_n * y * ln_y).exp())
    })?;
    Ok(v.with_prec(prec))
}
