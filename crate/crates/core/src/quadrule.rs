//! Complex Gaussian rules for `∫_0^∞ f(x) J_ν(x) dx`.
//!
//! Nodes are the zeros of `P_n`. Weights solve the Vandermonde system against the
//! exact moments, since the weight changes sign and there is no Christoffel theory
//! to lean on.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::solve_refined;
use crate::moments::{monic_adaptive, MomentSequence, DEFAULT_PREC_CAP};
use crate::mpfun::{BigComplex, BigReal};
use crate::zeros::find_zeros_with;

#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nu: BigReal,
    pub n: usize,
    /// Zeros of `P_n` in the original variable.
    pub nodes: Vec<BigComplex>,
    pub weights: Vec<BigComplex>,
    /// `max_{j ≤ 2n-1} |Σ w_k x_k^j - m_j|`, evaluated on the returned rule.
    pub exactness_report: BigReal,
    /// `max_{j ≤ 2n-1} |m_j|`.
    pub moment_scale: BigReal,
    /// Bits used for the polynomial, the roots and the weight solve.
    pub work_prec: u32,
}

impl QuadratureRule {
    pub fn relative_exactness(&self) -> BigReal {
        &self.exactness_report / &self.moment_scale
    }

    /// `|Σ w_k x_k^j - m_j|` for `j = 0..=deg`, with moments at `2 prec`.
    pub fn moment_defects(&self, deg: usize) -> Vec<BigReal> {
        let wp = 2 * self.nodes.first().map_or(64, BigComplex::prec);
        let ms = MomentSequence::new(&self.nu, deg + 1, wp);
        let mut pw: Vec<BigComplex> = self.nodes.iter().map(|_| BigComplex::one(wp)).collect();
        let mut out = Vec::with_capacity(deg + 1);
        for j in 0..=deg {
            let mut s = BigComplex::zero(wp);
            for (w, p) in self.weights.iter().zip(&pw) {
                s = &s + &(w * p);
            }
            out.push(s.add_real(&-ms.get(j)).abs());
            for (p, x) in pw.iter_mut().zip(&self.nodes) {
                *p = &*p * x;
            }
        }
        out
    }
}

/// The `n`-point rule at `prec` bits with the default precision cap.
pub fn gauss_rule(n: usize, nu: &BigReal, prec: u32) -> Result<QuadratureRule> {
    gauss_rule_with(n, nu, prec, DEFAULT_PREC_CAP, Exec::default())
}

/// `P_n` and its roots are carried to `2 prec` bits; the Vandermonde system is
/// solved at `2 prec` with two refinement steps; nodes and weights are returned
/// at `prec`.
pub fn gauss_rule_with(n: usize, nu: &BigReal, prec: u32, cap: u32, exec: Exec) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::InvalidInput("a rule needs n >= 1".into()));
    }
    let wp = 2 * prec;
    let build = monic_adaptive(n, nu, wp, cap)?;
    let zs = find_zeros_with(&build.poly, wp, exec)?;
    let roots: Vec<BigComplex> = zs.roots.iter().map(|r| r.with_prec(wp)).collect();
    let ms = MomentSequence::new(nu, 2 * n, wp);

    let mut rows = Vec::with_capacity(n);
    let mut pw: Vec<BigComplex> = roots.iter().map(|_| BigComplex::one(wp)).collect();
    for _ in 0..n {
        rows.push(pw.clone());
        for (p, x) in pw.iter_mut().zip(&roots) {
            *p = &*p * x;
        }
    }
    let rhs: Vec<BigComplex> = (0..n).map(|j| BigComplex::from_real(ms.get(j).clone())).collect();
    let w = solve_refined(&rows, &rhs, wp, 2)?;

    let mut rule = QuadratureRule {
        nu: nu.clone(),
        n,
        nodes: roots.iter().map(|r| r.with_prec(prec)).collect(),
        weights: w.iter().map(|v| v.with_prec(prec)).collect(),
        exactness_report: BigReal::zero(prec),
        moment_scale: ms.max_abs().with_prec(prec),
        work_prec: build.work_prec.max(zs.work_prec),
    };
    let worst = rule
        .moment_defects(2 * n - 1)
        .into_iter()
        .fold(BigReal::zero(wp), |a, b| if b > a { b } else { a });
    rule.exactness_report = worst.with_prec(prec);
    Ok(rule)
}

/// `Σ_k w_k f(x_k)`. For slowly decaying `f` this is the value in the same
/// regularized sense as the moments `m_j`.
pub fn apply_rule<F>(rule: &QuadratureRule, f: F) -> Result<BigComplex>
where
    F: Fn(&BigComplex) -> Result<BigComplex>,
{
    let p = rule.nodes.first().map_or(64, BigComplex::prec);
    let mut acc = BigComplex::zero(p);
    for (x, w) in rule.nodes.iter().zip(&rule.weights) {
        acc = &acc + &(w * &f(x)?);
    }
    Ok(acc)
}

/// One row of an exactness table.
#[derive(Clone, Debug, Serialize)]
pub struct ExactnessRow {
    pub n: usize,
    pub nu: f64,
    pub prec: u32,
    pub max_defect: f64,
    pub relative_defect: f64,
}

impl From<&QuadratureRule> for ExactnessRow {
    fn from(r: &QuadratureRule) -> Self {
        ExactnessRow {
            n: r.n,
            nu: r.nu.to_f64(),
            prec: r.nodes.first().map_or(0, BigComplex::prec),
            max_defect: r.exactness_report.to_f64(),
            relative_defect: r.relative_exactness().to_f64(),
        }
    }
}
