//! Tanh-sinh (double-exponential) quadrature on finite intervals.
//!
//! Nodes carry their distances to both endpoints, computed without cancellation,
//! so integrands with endpoint singularities such as `1/sqrt(1-x^2)` or `log x`
//! can be evaluated right up to the ends.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::mpfun::{BigComplex, BigReal};

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue: Clone + Send + Sync {
    fn zero_like(prec: u32) -> Self;
    fn plus(&self, other: &Self) -> Self;
    fn minus(&self, other: &Self) -> Self;
    fn scaled(&self, k: &BigReal) -> Self;
    fn magnitude(&self) -> BigReal;
}

impl QuadValue for BigReal {
    fn zero_like(prec: u32) -> Self {
        BigReal::zero(prec)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn scaled(&self, k: &BigReal) -> Self {
        self * k
    }
    fn magnitude(&self) -> BigReal {
        self.abs()
    }
}

impl QuadValue for BigComplex {
    fn zero_like(prec: u32) -> Self {
        BigComplex::zero(prec)
    }
    fn plus(&self, other: &Self) -> Self {
        self + other
    }
    fn minus(&self, other: &Self) -> Self {
        self - other
    }
    fn scaled(&self, k: &BigReal) -> Self {
        self.scale(k)
    }
    fn magnitude(&self) -> BigReal {
        self.abs()
    }
}

/// A quadrature node on `[a, b]`.
#[derive(Clone, Debug)]
pub struct Node {
    pub x: BigReal,
    /// `x - a`, accurate even when `x` rounds to `a`.
    pub from_a: BigReal,
    /// `b - x`, accurate even when `x` rounds to `b`.
    pub to_b: BigReal,
}

#[derive(Clone, Debug)]
pub struct QuadResult<T> {
    pub value: T,
    /// Absolute difference between the last two levels.
    pub error_estimate: BigReal,
    /// Σ |w f|, the scale against which the error is judged.
    pub l1_scale: BigReal,
    pub level: u32,
    pub evaluations: usize,
}

/// Standard nodes on `[-1, 1]` for `t = j h >= 0`: `(1 - tanh u, weight)` with
/// `u = (π/2) sinh t`.
type StdNodes = Arc<Vec<(i64, BigReal, BigReal)>>;

fn std_nodes(wp: u32, level: u32) -> StdNodes {
    static CACHE: OnceLock<Mutex<HashMap<(u32, u32), StdNodes>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().unwrap_or_else(|e| e.into_inner()).get(&(wp, level)) {
        return v.clone();
    }
    let t_max = (2.0 * f64::from(wp) * std::f64::consts::LN_2 / std::f64::consts::PI).asinh();
    let h = BigReal::exp2i(-(level as i32), wp);
    let m = (t_max * f64::from(1u32 << level)).ceil() as i64;
    let half_pi = BigReal::pi(wp).mul_pow2(-1);
    let mut out = Vec::new();
    for j in 0..=m {
        if level > 0 && j % 2 == 0 {
            continue;
        }
        let t = h.mul_i64(j);
        let u = &half_pi * t.sinh();
        let e2u = u.mul_pow2(1).exp();
        let comp = BigReal::from_i64(2, wp) / (&e2u + 1.0);
        let ch = u.cosh();
        let w = &half_pi * t.cosh() / ch.square();
        out.push((j, comp, w));
    }
    let v = Arc::new(out);
    cache
        .lock()
        .unwrap_or_else(|e| e.into_inner())
        .insert((wp, level), v.clone());
    v
}

/// Tanh-sinh integrator with a relative (to Σ|w f|) error target.
#[derive(Clone, Debug)]
pub struct Quad {
    pub prec: u32,
    /// Target is `2^tol_log2 · Σ|w f|`.
    pub tol_log2: f64,
    pub max_level: u32,
    pub exec: Exec,
}

impl Quad {
    /// Default target `2^(-0.6 prec)`, well inside the `2^(-prec/4)` contract.
    pub fn new(prec: u32) -> Self {
        Quad {
            prec,
            tol_log2: -0.6 * f64::from(prec),
            max_level: 11,
            exec: Exec::default(),
        }
    }

    pub fn with_tol_log2(mut self, tol_log2: f64) -> Self {
        self.tol_log2 = tol_log2;
        self
    }

    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.exec = exec;
        self
    }

    pub fn with_max_level(mut self, level: u32) -> Self {
        self.max_level = level;
        self
    }

    fn level_nodes(&self, a: &BigReal, b: &BigReal, level: u32) -> Vec<(Node, BigReal)> {
        let wp = self.prec;
        let nodes = std_nodes(wp, level);
        let len = b - a;
        let half = len.mul_pow2(-1);
        let hstep = BigReal::exp2i(-(level as i32), wp);
        let mut out = Vec::with_capacity(2 * nodes.len());
        for (j, comp, w) in nodes.iter() {
            let wt = &half * w * &hstep;
            if *j == 0 {
                out.push((
                    Node {
                        x: a + &half,
                        from_a: half.clone(),
                        to_b: half.clone(),
                    },
                    wt,
                ));
                continue;
            }
            let d = &half * comp;
            let far = &len - &d;
            out.push((
                Node {
                    x: b - &d,
                    from_a: far.clone(),
                    to_b: d.clone(),
                },
                wt.clone(),
            ));
            out.push((
                Node {
                    x: a + &d,
                    from_a: d,
                    to_b: far,
                },
                wt,
            ));
        }
        out
    }

    /// ∫_a^b f. The integrand sees each node with endpoint distances.
    pub fn integrate<T, F>(&self, a: &BigReal, b: &BigReal, f: F) -> Result<QuadResult<T>>
    where
        T: QuadValue,
        F: Fn(&Node) -> Result<T> + Sync + Send,
    {
        let wp = self.prec;
        if a == b {
            return Ok(QuadResult {
                value: T::zero_like(wp),
                error_estimate: BigReal::zero(wp),
                l1_scale: BigReal::zero(wp),
                level: 0,
                evaluations: 0,
            });
        }
        let mut sum = T::zero_like(wp);
        let mut l1 = BigReal::zero(wp);
        let mut prev: Option<T> = None;
        let mut evaluations = 0usize;
        let mut last_err = BigReal::from_f64(f64::INFINITY, wp);
        for level in 0..=self.max_level {
            let nodes = self.level_nodes(a, b, level);
            let vals = self.exec.try_map(&nodes, |(node, _)| f(node))?;
            evaluations += vals.len();
            let mut part = T::zero_like(wp);
            let mut part_l1 = BigReal::zero(wp);
            for ((_, w), v) in nodes.iter().zip(vals.iter()) {
                part = part.plus(&v.scaled(w));
                part_l1 = part_l1 + v.magnitude() * w;
            }
            // Halving h: S_k = S_{k-1}/2 + (new odd nodes at the finer step).
            let est = if level == 0 {
                sum = part;
                l1 = part_l1;
                sum.clone()
            } else {
                sum = sum.scaled(&BigReal::from_f64(0.5, wp)).plus(&part);
                l1 = l1.mul_pow2(-1) + part_l1;
                sum.clone()
            };
            if let Some(p) = &prev {
                let err = est.minus(p).magnitude();
                let scale = l1.clone();
                let ok = err.is_zero()
                    || (scale.is_zero() && err.is_zero())
                    || err.log2_abs() <= self.tol_log2 + scale.log2_abs();
                last_err = err.clone();
                if ok && level >= 2 {
                    return Ok(QuadResult {
                        value: est,
                        error_estimate: err,
                        l1_scale: scale,
                        level,
                        evaluations,
                    });
                }
                if scale.is_zero() && level >= 2 {
                    return Ok(QuadResult {
                        value: est,
                        error_estimate: err,
                        l1_scale: scale,
                        level,
                        evaluations,
                    });
                }
            }
            prev = Some(est);
        }
        Err(Error::Quadrature {
            estimate: last_err.to_f64(),
            target: 2f64.powf(self.tol_log2) * l1.to_f64(),
        })
    }

    /// Sum of integrals over consecutive breakpoints.
    pub fn integrate_pieces<T, F>(&self, breaks: &[BigReal], f: F) -> Result<QuadResult<T>>
    where
        T: QuadValue,
        F: Fn(&Node) -> Result<T> + Sync + Send,
    {
        let wp = self.prec;
        let mut total = QuadResult {
            value: T::zero_like(wp),
            error_estimate: BigReal::zero(wp),
            l1_scale: BigReal::zero(wp),
            level: 0,
            evaluations: 0,
        };
        for w in breaks.windows(2) {
            if w[0] == w[1] {
                continue;
            }
            let r = self.integrate(&w[0], &w[1], &f)?;
            total.value = total.value.plus(&r.value);
            total.error_estimate = total.error_estimate + r.error_estimate;
            total.l1_scale = total.l1_scale + r.l1_scale;
            total.level = total.level.max(r.level);
            total.evaluations += r.evaluations;
        }
        Ok(total)
    }
}
