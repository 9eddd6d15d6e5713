//! Simultaneous root finding (Aberth–Ehrlich) and statistics of the zeros of
//! `P̃_n` against the predicted zero line and limiting density.

use serde::Serialize;

use crate::equilibrium::psi_cdf;
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::moments::{monic_adaptive, rescale_to_tilde, MonicBuild, MonicPolynomial, Variable};
use crate::mpfun::{BigComplex, BigReal};

/// Sweep limit before giving up.
pub const MAX_SWEEPS: usize = 500;
/// Sweeps without a new smallest correction before the precision is raised.
const STALL_SWEEPS: usize = 25;

#[derive(Clone, Debug)]
pub struct ZeroSet {
    pub roots: Vec<BigComplex>,
    /// Newton correction `|P(r)/P'(r)|` at each root.
    pub residuals: Vec<BigReal>,
    pub variable: Variable,
    pub iterations: usize,
    /// Precision of the final sweeps.
    pub work_prec: u32,
}

impl ZeroSet {
    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    pub fn max_residual(&self) -> BigReal {
        let mut m = BigReal::zero(self.work_prec);
        for r in &self.residuals {
            if *r > m {
                m = r.clone();
            }
        }
        m
    }
}

/// Starting points, rotated off the real axis so that no two are conjugates.
fn initial_guesses(p: &MonicPolynomial, wp: u32) -> Vec<BigComplex> {
    let n = p.degree;
    let two_pi = BigReal::pi(wp).mul_pow2(1);
    let (ax, ay) = match p.variable {
        Variable::RescaledZ => (BigReal::from_f64(1.2, wp), BigReal::from_f64(0.4, wp)),
        Variable::RawX => {
            let c0 = p.coeffs[0].abs();
            let r = if c0.is_zero() {
                BigReal::one(wp)
            } else {
                (c0.ln().div_i64(n as i64)).exp().with_prec(wp)
            };
            (r.clone(), r)
        }
    };
    // On the circle, radii are staggered slightly: with an even polynomial the
    // start set is otherwise invariant under z ↦ -z, and Aberth can cycle.
    let stagger = matches!(p.variable, Variable::RawX);
    (0..n)
        .map(|k| {
            let t = &two_pi * BigReal::from_f64(k as f64 + 0.3, wp).div_i64(n as i64);
            let s = if stagger { 1.0 + 0.05 * k as f64 / n as f64 } else { 1.0 };
            BigComplex::new(&ax * t.cos() * s, &ay * t.sin() * s)
        })
        .collect()
}

/// One Aberth correction for root `k`, and `|P/P'|` there.
fn correction(p: &MonicPolynomial, roots: &[BigComplex], k: usize) -> (BigComplex, BigReal) {
    let z = &roots[k];
    let wp = z.prec();
    let (v, d) = p.eval_with_derivative(z);
    if d.is_zero() {
        // Critical point: nudge rather than divide by zero.
        let nudge = BigComplex::from_f64(1e-3, 1e-3, wp);
        return (nudge, BigReal::from_f64(f64::INFINITY, wp));
    }
    let newton = &v / &d;
    let mut s = BigComplex::zero(wp);
    for (j, r) in roots.iter().enumerate() {
        if j != k {
            let diff = z - r;
            if !diff.is_zero() {
                s = s + diff.recip();
            }
        }
    }
    let denom = BigComplex::one(wp) - &newton * &s;
    let corr = if denom.is_zero() { newton.clone() } else { &newton / &denom };
    (corr, newton.abs())
}

/// All roots of `p`, each with Newton residual at most `2^(-prec/2)`.
pub fn find_zeros(p: &MonicPolynomial, prec: u32) -> Result<ZeroSet> {
    find_zeros_with(p, prec, Exec::default())
}

/// [`find_zeros`] with an explicit execution mode for the per-root corrections.
pub fn find_zeros_with(p: &MonicPolynomial, prec: u32, exec: Exec) -> Result<ZeroSet> {
    let n = p.degree;
    if n == 0 {
        return Err(Error::InvalidInput("polynomial of degree 0 has no roots".into()));
    }
    let tol_log2 = -f64::from(prec) / 2.0;
    let max_wp = p.prec().max(prec + 64);
    let mut wp = max_wp.min(prec + 64 + 4 * n as u32);
    let mut pw = p.with_prec(wp);
    let mut roots = initial_guesses(p, wp);
    let mut best = f64::INFINITY;
    let mut best_at = 0usize;
    let mut worst = f64::INFINITY;
    for sweep in 1..=MAX_SWEEPS {
        let out = exec.map_range(n, |k| correction(&pw, &roots, k));
        let mut max_corr = f64::NEG_INFINITY;
        for (r, (c, _)) in roots.iter_mut().zip(&out) {
            max_corr = max_corr.max(c.abs().log2_abs());
            *r = &*r - c;
        }
        worst = max_corr;
        if max_corr <= tol_log2 {
            let residuals: Vec<BigReal> = exec.map_range(n, |k| {
                let (v, d) = pw.eval_with_derivative(&roots[k]);
                if d.is_zero() {
                    BigReal::from_f64(f64::INFINITY, wp)
                } else {
                    (&v / &d).abs()
                }
            });
            if residuals.iter().all(|r| r.log2_abs() <= tol_log2) {
                return Ok(ZeroSet {
                    roots: roots.iter().map(|r| r.with_prec(prec)).collect(),
                    residuals: residuals.iter().map(|r| r.with_prec(prec)).collect(),
                    variable: p.variable,
                    iterations: sweep,
                    work_prec: wp,
                });
            }
        }
        if max_corr < best - 1.0 {
            best = max_corr;
            best_at = sweep;
        } else if sweep - best_at > STALL_SWEEPS && wp < max_wp {
            // Stalled at the rounding floor: keep the roots, add precision.
            wp = max_wp.min(prec + 2 * (wp - prec));
            pw = p.with_prec(wp);
            roots = roots.iter().map(|r| r.with_prec(wp)).collect();
            best = f64::INFINITY;
            best_at = sweep;
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_SWEEPS,
        worst: worst.exp2(),
    })
}

/// Defects of the Vieta identities for the sum and the product of the roots,
/// each with its natural scale (`Σ|r|` and `Π|r|`).
#[derive(Clone, Debug)]
pub struct VietaDefects {
    pub sum: BigReal,
    pub sum_scale: BigReal,
    pub product: BigReal,
    pub product_scale: BigReal,
}

pub fn vieta_defects(zs: &ZeroSet, p: &MonicPolynomial) -> VietaDefects {
    let n = p.degree;
    let wp = p.prec().max(zs.work_prec);
    let mut sum = p.coeffs[n - 1].with_prec(wp);
    let mut sum_scale = BigReal::zero(wp);
    let mut prod = BigComplex::one(wp);
    for r in &zs.roots {
        sum = sum + r;
        sum_scale = sum_scale + r.abs();
        prod = prod * r;
    }
    let want = if n % 2 == 0 { p.coeffs[0].clone() } else { -p.coeffs[0].clone() };
    VietaDefects {
        sum: sum.abs(),
        sum_scale,
        product: prod.dist(&want),
        product_scale: prod.abs(),
    }
}

/// Largest distance from a root to the nearest reflected root `-r̄`.
pub fn reflection_defect(zs: &ZeroSet) -> BigReal {
    let mut worst = BigReal::zero(zs.work_prec);
    for r in &zs.roots {
        let m = -r.conj();
        let mut best: Option<BigReal> = None;
        for s in &zs.roots {
            let d = m.dist(s);
            if best.as_ref().is_none_or(|b| d < *b) {
                best = Some(d);
            }
        }
        if let Some(b) = best {
            if b > worst {
                worst = b;
            }
        }
    }
    worst
}

/// `ε_n = n^(ν-1/2) / (log n)^(ν+1/2)`.
pub fn epsilon_n(n: usize, nu: &BigReal) -> BigReal {
    let p = nu.prec();
    let nb = BigReal::from_i64(n as i64, p);
    let half = BigReal::from_f64(0.5, p);
    nb.powf(&(nu - &half)) / nb.ln().powf(&(nu + &half))
}

#[derive(Clone, Debug, Serialize)]
pub struct ZeroLineStats {
    /// max over retained zeros of `|Re z - νπ/2|` in the `P_n` frame.
    pub max_dev: f64,
    pub zeros_considered: usize,
    pub epsilon_n: f64,
}

/// `(max_dev, retained)` with the exact deviation kept as a big float.
pub fn zero_line_deviation(zs: &ZeroSet, n: usize, nu: &BigReal, delta: f64) -> Result<(BigReal, usize)> {
    if zs.variable != Variable::RescaledZ {
        return Err(Error::InvalidInput("zero_line_stats needs roots of the rescaled polynomial".into()));
    }
    if delta.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::InvalidInput("delta must be positive".into()));
    }
    let wp = zs.work_prec.max(nu.prec());
    let pi = BigReal::pi(wp);
    let radius = BigReal::from_f64(delta, wp) / &pi;
    let line = &pi * nu.with_prec(wp).mul_pow2(-1);
    let npi = &pi * BigReal::from_i64(n as i64, wp);
    let one = BigComplex::one(wp);
    let mut max_dev = BigReal::zero(wp);
    let mut kept = 0usize;
    for w in &zs.roots {
        let w = w.with_prec(wp);
        let excluded = w.abs() < radius || (&w - &one).abs() < radius || (&w + &one).abs() < radius;
        if excluded {
            continue;
        }
        kept += 1;
        // Re(inπw) = -nπ Im w.
        let re_z = -(&npi * &w.im);
        let dev = (re_z - &line).abs();
        if dev > max_dev {
            max_dev = dev;
        }
    }
    if kept == 0 {
        return Err(Error::EmptySet("every zero lies in an excluded disk".into()));
    }
    Ok((max_dev, kept))
}

/// Deviation of the retained zeros from the line `Re z = νπ/2`, with `ε_n`.
pub fn zero_line_stats(zs: &ZeroSet, n: usize, nu: &BigReal, delta: f64) -> Result<ZeroLineStats> {
    let (dev, kept) = zero_line_deviation(zs, n, nu, delta)?;
    Ok(ZeroLineStats {
        max_dev: dev.to_f64(),
        zeros_considered: kept,
        epsilon_n: epsilon_n(n, nu).to_f64(),
    })
}

/// Kolmogorov distance between the empirical CDF of `Re w` and the ψ-CDF.
pub fn ecdf_vs_psi(zs: &ZeroSet) -> Result<BigReal> {
    if zs.is_empty() {
        return Err(Error::EmptySet("no zeros".into()));
    }
    let mut xs: Vec<BigReal> = zs.roots.iter().map(|r| r.re.clone()).collect();
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len() as i64;
    let p = xs[0].prec();
    let mut d = BigReal::zero(p);
    for (i, x) in xs.iter().enumerate() {
        let f = psi_cdf(x);
        let hi = BigReal::from_ratio(i as i64 + 1, n, p) - &f;
        let lo = &f - BigReal::from_ratio(i as i64, n, p);
        for v in [hi, lo] {
            if v > d {
                d = v;
            }
        }
    }
    Ok(d)
}

/// `P_n` certified with room for the cancellation of the rescaling, then the
/// zeros of `P̃_n` to `prec` bits.
pub fn tilde_zeros(n: usize, nu: &BigReal, prec: u32, cap: u32, exec: Exec) -> Result<(MonicBuild, ZeroSet)> {
    let build = monic_adaptive(n, nu, prec + 4 * n as u32, cap)?;
    let pt = rescale_to_tilde(&build.poly);
    let zs = find_zeros_with(&pt, prec, exec)?;
    Ok((build, zs))
}

/// The zeros of `P_n` in the original variable, `x = inπ w`.
pub fn to_raw_roots(zs: &ZeroSet, n: usize) -> Vec<BigComplex> {
    zs.roots
        .iter()
        .map(|w| {
            let p = w.prec();
            let npi = BigReal::pi(p) * BigReal::from_i64(n as i64, p);
            w.scale(&npi).mul_i()
        })
        .collect()
}
