//! Moments of the Bessel weight, Hankel determinants and the monic orthogonal
//! polynomials `P_n` (raw frame) and `P̃_n` (rescaled frame).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::linalg::{hadamard_bound, residual, Lu};
use crate::mpfun::{bessel_k, BigComplex, BigReal, MIN_PREC};
use crate::quad::{Node, Quad, QuadValue};

/// Default ceiling for precision escalation, in bits.
pub const DEFAULT_PREC_CAP: u32 = 1 << 20;

/// `m_j = 2^j Γ((1+ν+j)/2) / Γ((1+ν-j)/2)`.
///
/// Evaluated as the product Π_{k<j} (ν+1-j+2k), which is the same quantity with
/// the Γ-ratio telescoped out; it is exactly 1 for `j = 0` and exactly 0 whenever
/// the denominator Γ has a pole.
pub fn moment(j: usize, nu: &BigReal, prec: u32) -> BigReal {
    let wp = prec.max(MIN_PREC) + 16;
    let base = nu.with_prec(wp.max(nu.prec())) + (1.0 - j as f64);
    let mut m = BigReal::one(wp);
    for k in 0..j {
        let f = &base + (2 * k) as f64;
        if f.is_zero() {
            return BigReal::zero(prec);
        }
        m = m * f;
    }
    m.with_prec(prec)
}

#[derive(Clone, Debug)]
pub struct MomentSequence {
    pub nu: BigReal,
    pub values: Vec<BigReal>,
    pub prec: u32,
}

impl MomentSequence {
    /// `m_0 .. m_{count-1}`.
    pub fn new(nu: &BigReal, count: usize, prec: u32) -> Self {
        MomentSequence {
            nu: nu.clone(),
            values: (0..count).map(|j| moment(j, nu, prec)).collect(),
            prec,
        }
    }

    pub fn get(&self, j: usize) -> &BigReal {
        &self.values[j]
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn max_abs(&self) -> BigReal {
        self.values
            .iter()
            .map(|v| v.abs())
            .fold(BigReal::zero(self.prec), |a, b| if b > a { b } else { a })
    }
}

fn hankel(ms: &MomentSequence, n: usize) -> Vec<Vec<BigReal>> {
    (0..n).map(|i| (0..n).map(|j| ms.get(i + j).clone()).collect()).collect()
}

fn check_nu(nu: &BigReal) -> Result<()> {
    if !nu.is_finite() || (nu.is_sign_negative() && !nu.is_zero()) || *nu >= 1.0 {
        return Err(Error::InvalidInput("nu must lie in [0, 1)".into()));
    }
    Ok(())
}

/// Δ_n = det[m_{i+j}]. Fails as indeterminate when |Δ_n| is below
/// `2^(-prec/2)` times the Hadamard bound of the matrix.
pub fn hankel_det(n: usize, nu: &BigReal, prec: u32) -> Result<BigReal> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    check_nu(nu)?;
    let ms = MomentSequence::new(nu, 2 * n - 1, prec);
    let a = hankel(&ms, n);
    let det = Lu::factor(&a, prec).det();
    indeterminate_check(&det, &a, prec)?;
    Ok(det)
}

fn indeterminate_check(det: &BigReal, a: &[Vec<BigReal>], prec: u32) -> Result<()> {
    let h = hadamard_bound(a, prec);
    if det.is_zero() || det.log2_abs() < h.log2_abs() - f64::from(prec) / 2.0 {
        return Err(Error::Indeterminate {
            prec,
            detail: format!(
                "|det| = 2^{:.1} against scale 2^{:.1}",
                det.log2_abs(),
                h.log2_abs()
            ),
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Variable {
    /// `P_n(x)` in the original variable.
    RawX,
    /// `P̃_n(z) = (inπ)^{-n} P_n(inπ z)`.
    RescaledZ,
}

/// Monic polynomial `z^n + c_{n-1} z^{n-1} + ... + c_0`.
#[derive(Clone, Debug)]
pub struct MonicPolynomial {
    pub degree: usize,
    pub coeffs: Vec<BigComplex>,
    pub variable: Variable,
}

impl MonicPolynomial {
    pub fn new(coeffs: Vec<BigComplex>, variable: Variable) -> Self {
        MonicPolynomial {
            degree: coeffs.len(),
            coeffs,
            variable,
        }
    }

    /// The monic polynomial with the given roots.
    pub fn from_roots(roots: &[BigComplex], variable: Variable, prec: u32) -> Self {
        let mut c = vec![BigComplex::one(prec)];
        for r in roots {
            let mut next = vec![BigComplex::zero(prec); c.len() + 1];
            for (k, ck) in c.iter().enumerate() {
                next[k + 1] = &next[k + 1] + ck;
                next[k] = &next[k] - &(ck * r);
            }
            c = next;
        }
        c.pop();
        MonicPolynomial::new(c, variable)
    }

    pub fn prec(&self) -> u32 {
        self.coeffs.iter().map(|c| c.prec()).max().unwrap_or(MIN_PREC)
    }

    /// All coefficients including the leading 1.
    pub fn full_coeffs(&self) -> Vec<BigComplex> {
        let mut v = self.coeffs.clone();
        v.push(BigComplex::one(self.prec()));
        v
    }

    pub fn eval(&self, z: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::one(self.prec().max(z.prec()));
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * z) + c;
        }
        acc
    }

    /// `(P(z), P'(z))`.
    pub fn eval_with_derivative(&self, z: &BigComplex) -> (BigComplex, BigComplex) {
        let p = self.prec().max(z.prec());
        let mut v = BigComplex::one(p);
        let mut d = BigComplex::zero(p);
        for c in self.coeffs.iter().rev() {
            d = &(&d * z) + &v;
            v = &(&v * z) + c;
        }
        (v, d)
    }

    /// Σ |c_k| |z|^k including the leading term, the rounding scale of `eval`.
    pub fn abs_eval(&self, r: &BigReal) -> BigReal {
        let mut acc = BigReal::one(self.prec());
        for c in self.coeffs.iter().rev() {
            acc = &acc * r + c.abs();
        }
        acc
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        MonicPolynomial::new(self.coeffs.iter().map(|c| c.with_prec(prec)).collect(), self.variable)
    }
}

/// Outcome of an adaptive `P_n` construction.
#[derive(Clone, Debug)]
pub struct MonicBuild {
    pub poly: MonicPolynomial,
    /// Precision at which the accepted solve ran.
    pub work_prec: u32,
    /// max_j |Σ c_k m_{j+k} + m_{j+n}| / (row scale).
    pub relative_residual: BigReal,
    /// log2 of the normwise difference between the accepted solve and one at
    /// higher precision, measured in the rescaled frame.
    pub agreement_log2: f64,
    pub hankel_det: BigReal,
}

fn solve_hankel(n: usize, nu: &BigReal, wp: u32) -> Result<(Vec<BigReal>, BigReal, BigReal)> {
    let ms = MomentSequence::new(nu, 2 * n, wp);
    let a = hankel(&ms, n);
    let b: Vec<BigReal> = (0..n).map(|j| -ms.get(j + n)).collect();
    let lu = Lu::factor(&a, wp);
    let det = lu.det();
    indeterminate_check(&det, &a, wp)?;
    let c = lu.solve(&b)?;
    // Residual at double precision, relative to the row scale.
    let r = residual(&a, &c, &b, 2 * wp);
    let mut worst = BigReal::zero(wp);
    for (j, rj) in r.iter().enumerate() {
        let mut scale = ms.get(j + n).abs();
        for (k, ck) in c.iter().enumerate() {
            scale = scale + (ck * ms.get(j + k)).abs();
        }
        let rel = if scale.is_zero() { rj.abs() } else { rj.abs() / scale };
        if rel > worst {
            worst = rel;
        }
    }
    Ok((c, worst, det))
}

fn raw_to_complex(c: &[BigReal]) -> Vec<BigComplex> {
    c.iter().map(|x| BigComplex::from_real(x.clone())).collect()
}

/// Builds `P_n` with precision escalation until two solves at different precisions
/// agree to `prec` bits in the rescaled frame and the Hankel residual meets
/// `2^(-prec/4)`.
pub fn monic_adaptive(n: usize, nu: &BigReal, prec: u32, cap: u32) -> Result<MonicBuild> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be >= 1".into()));
    }
    check_nu(nu)?;
    let target = f64::from(prec.max(MIN_PREC));
    let mut wp = prec.max(256).max(16 * n as u32).max(prec + 64);
    let mut last_err: Error;
    loop {
        let check_prec = wp + wp / 2;
        let attempt = (|| -> Result<MonicBuild> {
            let (c, res, det) = solve_hankel(n, nu, wp)?;
            let (c2, _, _) = solve_hankel(n, nu, check_prec)?;
            let t1 = rescale_to_tilde(&MonicPolynomial::new(raw_to_complex(&c), Variable::RawX));
            let t2 = rescale_to_tilde(&MonicPolynomial::new(raw_to_complex(&c2), Variable::RawX));
            let mut diff = BigReal::zero(check_prec);
            let mut size = BigReal::one(check_prec);
            for (a, b) in t1.coeffs.iter().zip(&t2.coeffs) {
                let d = a.dist(b);
                if d > diff {
                    diff = d;
                }
                let s = b.abs();
                if s > size {
                    size = s;
                }
            }
            let agreement = if diff.is_zero() {
                f64::NEG_INFINITY
            } else {
                diff.log2_abs() - size.log2_abs()
            };
            let res_ok = res.is_zero() || res.log2_abs() <= -target / 4.0;
            if agreement > -target || !res_ok {
                return Err(Error::Solver(format!(
                    "agreement 2^{agreement:.1}, residual 2^{:.1} at {wp} bits",
                    res.log2_abs()
                )));
            }
            Ok(MonicBuild {
                poly: MonicPolynomial::new(raw_to_complex(&c), Variable::RawX),
                work_prec: wp,
                relative_residual: res,
                agreement_log2: agreement,
                hankel_det: det,
            })
        })();
        match attempt {
            Ok(b) => return Ok(b),
            Err(e) => last_err = e,
        }
        if wp >= cap {
            return Err(last_err);
        }
        wp = (wp * 2).min(cap);
    }
}

/// `P_n` for the Bessel weight, certified to `prec` bits (see [`monic_adaptive`]).
pub fn monic_op(n: usize, nu: &BigReal, prec: u32) -> Result<MonicPolynomial> {
    Ok(monic_adaptive(n, nu, prec, DEFAULT_PREC_CAP)?.poly)
}

/// `P_n` solved once at exactly `prec` bits, without certification.
pub fn monic_fixed(n: usize, nu: &BigReal, prec: u32) -> Result<MonicPolynomial> {
    check_nu(nu)?;
    let (c, _, _) = solve_hankel(n, nu, prec)?;
    Ok(MonicPolynomial::new(raw_to_complex(&c), Variable::RawX))
}

/// `(i n π)^{-m}` split as `(nπ)^{-m}` times the exact unit `i^{-m}`.
fn inpi_pow(n: usize, m: i64, prec: u32) -> BigComplex {
    let npi = BigReal::pi(prec).mul_i64(n as i64);
    let mag = npi.powi(-(m as i32));
    let z = BigReal::zero(prec);
    match m.rem_euclid(4) {
        0 => BigComplex::new(mag, z),
        1 => BigComplex::new(z, -mag),
        2 => BigComplex::new(-mag, z),
        _ => BigComplex::new(z, mag),
    }
}

/// `c̃_k = c_k (inπ)^{k-n}`.
pub fn rescale_to_tilde(p: &MonicPolynomial) -> MonicPolynomial {
    let n = p.degree;
    let prec = p.prec();
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c * &inpi_pow(n, (n - k) as i64, prec))
        .collect();
    MonicPolynomial::new(coeffs, Variable::RescaledZ)
}

/// Inverse of [`rescale_to_tilde`].
pub fn rescale_to_raw(p: &MonicPolynomial) -> MonicPolynomial {
    let n = p.degree;
    let prec = p.prec();
    let coeffs = p
        .coeffs
        .iter()
        .enumerate()
        .map(|(k, c)| c / &inpi_pow(n, (n - k) as i64, prec))
        .collect();
    MonicPolynomial::new(coeffs, Variable::RawX)
}

/// Value of a weighted integral together with Σ|w f|, the natural scale for it.
#[derive(Clone, Debug)]
pub struct ScaledIntegral {
    pub value: BigComplex,
    pub scale: BigReal,
}

#[derive(Clone)]
struct CVec(Vec<BigComplex>);

impl QuadValue for CVec {
    fn zero_like(prec: u32) -> Self {
        CVec(vec![BigComplex::zero(prec)])
    }
    fn plus(&self, o: &Self) -> Self {
        let n = self.0.len().max(o.0.len());
        let p = self.0[0].prec();
        CVec(
            (0..n)
                .map(|i| {
                    let a = self.0.get(i).cloned().unwrap_or_else(|| BigComplex::zero(p));
                    let b = o.0.get(i).cloned().unwrap_or_else(|| BigComplex::zero(p));
                    a + b
                })
                .collect(),
        )
    }
    fn minus(&self, o: &Self) -> Self {
        let neg = CVec(o.0.iter().map(|v| -v).collect());
        self.plus(&neg)
    }
    fn scaled(&self, k: &BigReal) -> Self {
        CVec(self.0.iter().map(|v| v.scale(k)).collect())
    }
    fn magnitude(&self) -> BigReal {
        self.0
            .iter()
            .map(|v| v.abs())
            .fold(BigReal::zero(MIN_PREC), |a, b| if b > a { b } else { a })
    }
}

/// ∫ P̃_n(x) x^j e^{-sgn(x) νπi/2} K_ν(nπ|x|) dx for every `j` in `0..=jmax`, each with
/// its own scale ∫ |P̃_n(x) x^j K_ν(nπ|x|)| dx.
pub fn orthogonality_residuals(
    pt: &MonicPolynomial,
    jmax: usize,
    n: usize,
    nu: &BigReal,
    prec: u32,
    exec: Exec,
) -> Result<Vec<ScaledIntegral>> {
    if pt.variable != Variable::RescaledZ {
        return Err(Error::InvalidInput("expected a rescaled polynomial".into()));
    }
    check_nu(nu)?;
    let wp = prec.max(MIN_PREC);
    let npi = BigReal::pi(wp).mul_i64(n as i64);
    // Truncate where e^{-nπX} < 2^{-wp}.
    let x_max = BigReal::from_f64(
        (f64::from(wp) + 8.0) * std::f64::consts::LN_2 / (n as f64 * std::f64::consts::PI) + 1.0 / n as f64,
        wp,
    );
    let phase = (nu * &BigReal::pi(wp)).mul_pow2(-1);
    let e_minus = BigComplex::cis(&-&phase);
    let e_plus = BigComplex::cis(&phase);
    let quad = Quad::new(wp).with_exec(exec).with_tol_log2(-0.5 * f64::from(wp));
    // Half-line integrals over t = |x| in (0, X]; x = ±t.
    let side = |sign: i64| -> Result<(Vec<BigComplex>, Vec<BigReal>)> {
        let integrand = |node: &Node| -> Result<CVec> {
            // x = a + d is exact on the piece starting at 0.
            let t = &node.x;
            let k = bessel_k(nu, &(t * &npi), wp)?;
            let x = if sign > 0 { t.clone() } else { -t };
            let xc = BigComplex::from_real(x.clone());
            let base = pt.eval(&xc).scale(&k);
            let w = if sign > 0 { &e_minus } else { &e_plus };
            let mut out = Vec::with_capacity(2 * (jmax + 1));
            let mut pw = base;
            for _ in 0..=jmax {
                out.push(&pw * w);
                pw = pw.scale(&x);
            }
            // Scale from the smooth majorant Σ|c_k||x|^k; |P̃| itself has kinks at
            // real roots that stall the quadrature. Stored as real parts.
            let mut apw = pt.abs_eval(&x.abs()) * k.abs();
            for _ in 0..=jmax {
                out.push(BigComplex::from_real(apw.clone()));
                apw = apw * x.abs();
            }
            Ok(CVec(out))
        };
        let zero = BigReal::zero(wp);
        let mid = BigReal::from_f64(1.0 / n as f64, wp);
        let r = quad.integrate_pieces(&[zero, mid, x_max.clone()], integrand)?;
        let vals = r.value.0;
        let (v, s) = vals.split_at(jmax + 1);
        Ok((v.to_vec(), s.iter().map(|c| c.re.clone()).collect()))
    };
    let (vp, sp) = side(1)?;
    let (vm, sm) = side(-1)?;
    Ok((0..=jmax)
        .map(|j| ScaledIntegral {
            value: &vp[j] + &vm[j],
            scale: &sp[j] + &sm[j],
        })
        .collect())
}

/// Single-`j` form of [`orthogonality_residuals`].
pub fn orthogonality_residual(
    pt: &MonicPolynomial,
    j: usize,
    n: usize,
    nu: &BigReal,
    prec: u32,
) -> Result<ScaledIntegral> {
    let mut v = orthogonality_residuals(pt, j, n, nu, prec, Exec::default())?;
    Ok(v.swap_remove(j))
}
