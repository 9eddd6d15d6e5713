//! Invariant suites with measured-vs-threshold reports.
//!
//! Asymptotic checks fit their constant on the smallest `n` of a run and test every
//! larger `n` against it with slack [`SLACK`]; constants are never refitted per `n`.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;
use std::sync::{Arc, Mutex};
use std::time::Instant;

use serde::Serialize;

use crate::equilibrium::{
    ell_const, g_boundary, psi_cdf, psi_cdf_quad, theta_n, theta_n_quad, EquilibriumContext, Side,
};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::moments::{monic_adaptive, rescale_to_tilde, MonicBuild, MonicPolynomial, DEFAULT_PREC_CAP};
use crate::mpfun::{BigComplex, BigReal};
use crate::parametrix::{det2, inner_eval, n0_matrix, outer_eval, zero_condition_defect, SzegoContext};
use crate::quadrule::{gauss_rule_with, ExactnessRow};
use crate::smallnorm::{bessel_ratio_bounds_check, eta_bound_check_with, k_norm_bounds, CutoffChi};
use crate::zeros::{
    ecdf_vs_psi, epsilon_n, find_zeros_with, reflection_defect, to_raw_roots, zero_line_stats, ZeroSet,
};

pub const SLACK: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    Below,
    AtLeast,
}

#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub relation: Relation,
    pub threshold: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            relation: Relation::AtMost,
            threshold,
            passed: measured <= threshold,
        }
    }

    pub fn below(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            relation: Relation::Below,
            threshold,
            passed: measured < threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            relation: Relation::AtLeast,
            threshold,
            passed: measured >= threshold,
        }
    }

    /// How much of the allowance is used: 1 means exactly at the threshold.
    pub fn usage(&self) -> f64 {
        match self.relation {
            Relation::AtLeast => self.threshold / self.measured,
            _ => self.measured / self.threshold,
        }
    }
}

pub type Row = BTreeMap<String, f64>;

fn row(pairs: &[(&str, f64)]) -> Row {
    pairs.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Outcome {
    pub checks: Vec<Check>,
    pub table: Vec<Row>,
}

impl Outcome {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn absorb(&mut self, other: Outcome) {
        self.checks.extend(other.checks);
        self.table.extend(other.table);
    }

    /// Names of the failing checks.
    pub fn failures(&self) -> Vec<&str> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect()
    }
}

/// Certified `P_n` builds and their rescaled zeros, shared across checks.
///
/// A build for `(ν, n)` is certified at `prec + 4n` bits so that the rescaled
/// polynomial keeps `prec` good bits.
pub struct BuildCache {
    pub prec: u32,
    pub cap: u32,
    pub exec: Exec,
    builds: Mutex<HashMap<(u64, usize), Arc<MonicBuild>>>,
    zeros: Mutex<HashMap<(u64, usize), Arc<ZeroSet>>>,
}

impl BuildCache {
    pub fn new(prec: u32, cap: u32, exec: Exec) -> Self {
        BuildCache {
            prec,
            cap,
            exec,
            builds: Mutex::new(HashMap::new()),
            zeros: Mutex::new(HashMap::new()),
        }
    }

    pub fn nu(&self, nu: f64) -> BigReal {
        BigReal::from_f64(nu, self.prec)
    }

    pub fn build(&self, n: usize, nu: f64) -> Result<Arc<MonicBuild>> {
        let key = (nu.to_bits(), n);
        if let Some(b) = self.builds.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(b.clone());
        }
        let b = Arc::new(monic_adaptive(n, &self.nu(nu), self.prec + 4 * n as u32, self.cap)?);
        self.builds
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, b.clone());
        Ok(b)
    }

    pub fn tilde(&self, n: usize, nu: f64) -> Result<MonicPolynomial> {
        Ok(rescale_to_tilde(&self.build(n, nu)?.poly))
    }

    /// Zeros of `P̃_n` to `prec` bits.
    pub fn zeros(&self, n: usize, nu: f64) -> Result<Arc<ZeroSet>> {
        let key = (nu.to_bits(), n);
        if let Some(z) = self.zeros.lock().unwrap_or_else(|e| e.into_inner()).get(&key) {
            return Ok(z.clone());
        }
        let z = Arc::new(find_zeros_with(&self.tilde(n, nu)?, self.prec, self.exec)?);
        self.zeros
            .lock()
            .unwrap_or_else(|e| e.into_inner())
            .insert(key, z.clone());
        Ok(z)
    }
}

/// For `ν = 0`, every zero of `P_n` lies on the imaginary axis.
pub fn imaginary_axis_law(cache: &BuildCache, ns: &[usize], tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    for &n in ns {
        let zs = cache.zeros(n, 0.0)?;
        let raw = to_raw_roots(&zs, n);
        let worst = raw.iter().map(|x| x.re.abs()).fold(BigReal::zero(cache.prec), |a, b| {
            if b > a {
                b
            } else {
                a
            }
        });
        let w = worst.to_f64();
        out.checks.push(Check::at_most(format!("nu=0 n={n} max|Re x|"), w, tol));
        out.table.push(row(&[("n", n as f64), ("max_abs_re", w), ("work_prec", zs.work_prec as f64)]));
    }
    Ok(out)
}

/// Moment exactness of the `n`-point rules, relative to `max_j |m_j|`.
pub fn quadrature_exactness(
    ns: &[usize],
    nus: &[f64],
    prec: u32,
    cap: u32,
    exec: Exec,
    tol: f64,
) -> Result<Outcome> {
    let jobs: Vec<(usize, f64)> = nus.iter().flat_map(|&v| ns.iter().map(move |&n| (n, v))).collect();
    let rules = exec.try_map(&jobs, |&(n, v)| {
        gauss_rule_with(n, &BigReal::from_f64(v, prec), prec, cap, Exec::Sequential)
    })?;
    let mut out = Outcome::default();
    for r in &rules {
        let er = ExactnessRow::from(r);
        out.checks.push(Check::at_most(
            format!("nu={} n={} relative moment defect", er.nu, er.n),
            er.relative_defect,
            tol,
        ));
        let sum: BigComplex = r.weights.iter().fold(BigComplex::zero(prec), |a, w| &a + w);
        let d = sum.dist(&BigComplex::one(prec)).to_f64();
        out.checks.push(Check::at_most(format!("nu={} n={} weight sum", er.nu, er.n), d, tol));
        out.table.push(row(&[
            ("n", er.n as f64),
            ("nu", er.nu),
            ("max_defect", er.max_defect),
            ("relative_defect", er.relative_defect),
            ("weight_sum_defect", d),
        ]));
    }
    Ok(out)
}

/// `|P̃_n(z)/prediction - 1| ≤ SLACK · C ε_n`, `C` fitted at `ns[0]`.
pub fn outer_trend(cache: &BuildCache, nu: f64, ns: &[usize], points: &[(f64, f64)]) -> Result<Outcome> {
    let p = cache.prec;
    let nub = cache.nu(nu);
    let mut out = Outcome::default();
    let mut fitted: Vec<f64> = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let pt = cache.tilde(n, nu)?;
        let eps = epsilon_n(n, &nub).to_f64();
        for (k, &(re, im)) in points.iter().enumerate() {
            let z = BigComplex::from_f64(re, im, p);
            let pred = outer_eval(&z, n, &nub, p)?;
            let act = pt.eval(&z.with_prec(pt.prec()));
            let r = (act / pred.value.with_prec(pt.prec()) - BigComplex::one(p)).abs().to_f64();
            if i == 0 {
                fitted.push(r / eps);
            } else {
                out.checks.push(Check::at_most(
                    format!("outer nu={nu} z=({re},{im}) n={n} ratio/(C eps_n)"),
                    r / (fitted[k] * eps),
                    SLACK,
                ));
            }
            out.table.push(row(&[
                ("n", n as f64),
                ("z_re", re),
                ("z_im", im),
                ("rel_err", r),
                ("eps_n", eps),
                ("c_fit", fitted[k]),
            ]));
        }
    }
    Ok(out)
}

/// `|P̃_n(x) - pred| ≤ |pref| (3 log n/n (|t₁|+|t₂|) + SLACK·C ε_n)`, `C` fitted at `ns[0]`.
pub fn inner_trend(cache: &BuildCache, nu: f64, ns: &[usize], xs: &[f64]) -> Result<Outcome> {
    let p = cache.prec;
    let nub = cache.nu(nu);
    let mut out = Outcome::default();
    let mut fitted: Vec<f64> = Vec::new();
    for (i, &n) in ns.iter().enumerate() {
        let pt = cache.tilde(n, nu)?;
        let eps = epsilon_n(n, &nub).to_f64();
        let nf = n as f64;
        for (k, &x) in xs.iter().enumerate() {
            let z = BigComplex::from_f64(x, 0.0, p);
            let pred = inner_eval(&z, n, &nub, p)?;
            let parts = pred.inner.clone().ok_or_else(|| Error::Solver("inner parts missing".into()))?;
            let act = pt.eval(&z.with_prec(pt.prec())).with_prec(p);
            let pref = parts.prefactor.abs().to_f64();
            let rel = act.dist(&pred.value).to_f64() / pref;
            let band = 3.0 * nf.ln() / nf * (parts.term1.abs() + parts.term2.abs()).to_f64();
            if i == 0 {
                fitted.push(((rel - band) / eps).max(0.0));
            } else {
                out.checks.push(Check::at_most(
                    format!("inner nu={nu} x={x} n={n} diff/(band + 3 C eps_n)"),
                    rel / (band + SLACK * fitted[k] * eps),
                    1.0,
                ));
            }
            out.table.push(row(&[
                ("n", nf),
                ("x", x),
                ("diff_over_prefactor", rel),
                ("band", band),
                ("eps_n", eps),
                ("c_fit", fitted[k]),
            ]));
        }
    }
    Ok(out)
}

/// Retained-zero distance to the line `Re w = νπ/2` against `C ε_n`.
pub fn zero_line_trend(cache: &BuildCache, nu: f64, ns: &[usize], delta: f64) -> Result<Outcome> {
    let nub = cache.nu(nu);
    let mut out = Outcome::default();
    let mut c = f64::NAN;
    for (i, &n) in ns.iter().enumerate() {
        let zs = cache.zeros(n, nu)?;
        let st = zero_line_stats(&zs, n, &nub, delta)?;
        let ratio = st.max_dev / st.epsilon_n;
        out.checks.push(Check::at_least(
            format!("nu={nu} n={n} retained zeros"),
            st.zeros_considered as f64,
            1.0,
        ));
        if i == 0 {
            c = ratio;
        } else {
            out.checks.push(Check::at_most(
                format!("nu={nu} n={n} max_dev/eps_n over C"),
                ratio / c,
                SLACK,
            ));
        }
        let mut worst_cond = 0.0f64;
        for z in &zs.roots {
            if crate::equilibrium::in_validated_box(z, delta) {
                worst_cond = worst_cond.max(zero_condition_defect(z, n, &nub)?.to_f64());
            }
        }
        out.table.push(row(&[
            ("n", n as f64),
            ("nu", nu),
            ("max_dev", st.max_dev),
            ("eps_n", st.epsilon_n),
            ("ratio", ratio),
            ("zeros_considered", st.zeros_considered as f64),
            ("zero_condition_defect_over_eps", worst_cond / st.epsilon_n),
            ("reflection_defect", reflection_defect(&zs).to_f64()),
            ("max_residual", zs.max_residual().to_f64()),
        ]));
    }
    Ok(out)
}

/// Kolmogorov distance of the zero real parts to the ψ law: at most `first_tol` at
/// `ns[0]`, then strictly decreasing.
pub fn weak_convergence(cache: &BuildCache, nu: f64, ns: &[usize], first_tol: f64) -> Result<Outcome> {
    let mut out = Outcome::default();
    let mut prev = f64::NAN;
    for (i, &n) in ns.iter().enumerate() {
        let ks = ecdf_vs_psi(&*cache.zeros(n, nu)?)?.to_f64();
        if i == 0 {
            out.checks.push(Check::at_most(format!("nu={nu} n={n} KS distance"), ks, first_tol));
        } else {
            out.checks.push(Check::below(format!("nu={nu} n={n} KS distance vs previous"), ks, prev));
        }
        out.table.push(row(&[("n", n as f64), ("nu", nu), ("ks", ks)]));
        prev = ks;
    }
    Ok(out)
}

/// Identities of the equilibrium density, `g` and `ℓ`.
pub fn equilibrium_identities(prec: u32) -> Result<Outcome> {
    let ctx = EquilibriumContext::new(prec);
    let r = |x: f64| BigReal::from_f64(x, prec);
    let mut out = Outcome::default();
    let mass = (psi_cdf_quad(&r(1.0), &ctx)? - 1.0).abs().to_f64();
    out.checks.push(Check::at_most("integral of psi", mass, 1e-30));
    let ell = ell_const(prec);
    for x in [-0.7, -0.3, 0.3, 0.7] {
        let gp = g_boundary(&r(x), Side::Plus, &ctx)?;
        let gm = g_boundary(&r(x), Side::Minus, &ctx)?;
        let lhs = (gp + gm).re - BigReal::pi(prec) * r(x).abs();
        let d = (&lhs - &ell).abs().to_f64();
        out.checks.push(Check::at_most(format!("variational equality x={x}"), d, 1e-25));
        out.table.push(row(&[("x", x), ("variational_defect", d)]));
    }
    let gp = g_boundary(&r(-2.0), Side::Plus, &ctx)?;
    let gm = g_boundary(&r(-2.0), Side::Minus, &ctx)?;
    let jump = &gp - &gm;
    let two_pi_i = BigComplex::new(BigReal::zero(prec), BigReal::pi(prec).mul_pow2(1));
    out.checks.push(Check::at_most("g jump at x=-2", jump.dist(&two_pi_i).to_f64(), 1e-25));
    for x in [-0.9, -0.2, 0.4, 0.95] {
        let d = (psi_cdf(&r(x)) - psi_cdf_quad(&r(x), &ctx)?).abs().to_f64();
        out.checks.push(Check::at_most(format!("psi cdf routes agree x={x}"), d, 1e-25));
    }
    for (re, im) in [(0.3, 0.0), (0.6, 0.05), (0.2, -0.08)] {
        let z = BigComplex::from_f64(re, im, prec);
        let d = theta_n(&z, 16)?.dist(&theta_n_quad(&z, 16, &ctx)?).to_f64();
        out.checks.push(Check::at_most(format!("theta routes agree z=({re},{im})"), d, 1e-25));
    }
    Ok(out)
}

/// `|D_{∞,n} - 2^{1/4}|` strictly decreasing and at most `SLACK·C log n/n`.
pub fn szego_limits(nu: f64, ns: &[usize], prec: u32, exec: Exec) -> Result<Outcome> {
    let nub = BigReal::from_f64(nu, prec);
    let limit = BigReal::from_i64(2, prec).powf(&BigReal::from_f64(0.25, prec));
    let diffs = exec.try_map(ns, |&n| -> Result<f64> {
        let d = SzegoContext::new(n, &nub, prec).d_infty()?;
        Ok((&d - &limit).abs().to_f64())
    })?;
    let mut out = Outcome::default();
    let scale = |n: usize| (n as f64).ln() / n as f64;
    let c = diffs[0] / scale(ns[0]);
    for (i, (&n, &d)) in ns.iter().zip(&diffs).enumerate() {
        if i > 0 {
            out.checks.push(Check::below(format!("D_inf n={n} diff vs previous"), d, diffs[i - 1]));
            out.checks.push(Check::at_most(format!("D_inf n={n} diff/(C log n/n)"), d / (c * scale(n)), SLACK));
        }
        out.table.push(row(&[("n", n as f64), ("nu", nu), ("d_infty_diff", d), ("c_fit", c)]));
    }
    Ok(out)
}

/// Decay of the `K₁`, `K₂` norm majorants over `ns`.
pub fn smallnorm_trend(nu: f64, ns: &[usize], prec: u32, exec: Exec) -> Result<Outcome> {
    let nub = BigReal::from_f64(nu, prec);
    let chi = CutoffChi::standard(prec);
    let ks = exec.try_map(ns, |&n| k_norm_bounds(n, &nub, &chi, prec))?;
    let mut out = Outcome::default();
    let s1 = |n: usize| ((n as f64) * (n as f64).ln()).powf(nu);
    let s2 = |n: usize| ((n as f64).ln() / n as f64).powf(nu);
    let c1 = ks[0].k1_bound * s1(ns[0]);
    let c2 = ks[0].k2_bound * s2(ns[0]);
    for (i, (&n, k)) in ns.iter().zip(&ks).enumerate() {
        let a = k.k1_bound * s1(n);
        let b = k.k2_bound * s2(n);
        if i > 0 {
            out.checks.push(Check::at_most(format!("nu={nu} n={n} k1 n^nu log^nu / C"), a / c1, SLACK));
            out.checks.push(Check::at_most(format!("nu={nu} n={n} k2 n^-nu log^nu / C"), b / c2, SLACK));
            out.checks.push(Check::below(
                format!("nu={nu} n={n} product vs previous"),
                k.product,
                ks[i - 1].product,
            ));
        }
        out.table.push(row(&[
            ("n", n as f64),
            ("nu", nu),
            ("k1_bound", k.k1_bound),
            ("k2_bound", k.k2_bound),
            ("product", k.product),
            ("k1_scaled", a),
            ("k2_scaled", b),
            ("tail_fraction_k1", k.tail_fraction.0),
            ("tail_fraction_k2", k.tail_fraction.1),
        ]));
    }
    if (nu - 0.5).abs() < 1e-12 && ns.len() > 1 {
        let (n0, n1) = (ns[0], ns[ns.len() - 1]);
        let ratio = ks[ks.len() - 1].product / ks[0].product;
        out.checks.push(Check::at_most(
            format!("nu=1/2 product({n1})/product({n0}) vs log ratio"),
            ratio,
            SLACK * (n0 as f64).ln() / (n1 as f64).ln(),
        ));
    }
    Ok(out)
}

/// Pointwise `η` and `|D₁|²` bounds, constants fitted at `ns[0]` over the samples.
pub fn eta_trend(nu: f64, ns: &[usize], ys: &[f64], prec: u32) -> Result<Outcome> {
    let nub = BigReal::from_f64(nu, prec);
    let chi = CutoffChi::standard(prec);
    let mut out = Outcome::default();
    let mut fit = [0.0f64; 3];
    for (i, &n) in ns.iter().enumerate() {
        let ctx = SzegoContext::new(n, &nub, prec);
        let mut worst = [0.0f64; 3];
        for &y in ys {
            let e = eta_bound_check_with(&ctx, &BigReal::from_f64(y, prec), &chi)?;
            let r = [
                (&e.eta1_mod / &e.bound1).to_f64(),
                (&e.eta2_mod / &e.bound2).to_f64(),
                (&e.d1_sq / &e.d1_shape).to_f64(),
            ];
            for k in 0..3 {
                worst[k] = worst[k].max(r[k]);
            }
            out.table.push(row(&[
                ("n", n as f64),
                ("y", y),
                ("eta1_over_bound", r[0]),
                ("eta2_over_bound", r[1]),
                ("d1sq_over_shape", r[2]),
            ]));
        }
        if i == 0 {
            fit = worst;
        } else {
            for (k, what) in ["eta1", "eta2", "|D1|^2"].iter().enumerate() {
                out.checks.push(Check::at_most(
                    format!("nu={nu} n={n} {what} over fitted bound"),
                    worst[k] / fit[k],
                    SLACK,
                ));
            }
        }
    }
    Ok(out)
}

/// The two Bessel ratios over `count` log-spaced `s ∈ [1e-4, 1e4]`: bounded, maximum
/// in the interior, and the dense maximum within 1% of the half-density one.
pub fn bessel_ratio_sweep(nus: &[f64], count: usize, prec: u32) -> Result<Outcome> {
    let mut out = Outcome::default();
    for &nu in nus {
        let nub = BigReal::from_f64(nu, prec);
        let mut dense = [(0.0f64, 0usize); 2];
        let mut half = [0.0f64; 2];
        for k in 0..count {
            let s = 10f64.powf(-4.0 + 8.0 * k as f64 / (count - 1) as f64);
            let c = bessel_ratio_bounds_check(&BigReal::from_f64(s, prec), &nub)?;
            for (j, v) in [c.ratio1(), c.ratio2()].into_iter().enumerate() {
                if !(v <= dense[j].0) {
                    dense[j] = (v, k);
                }
                if k % 2 == 0 {
                    half[j] = half[j].max(v);
                }
            }
        }
        for j in 0..2 {
            let (m, at) = dense[j];
            out.checks.push(Check::below(format!("nu={nu} ratio{} sweep max finite", j + 1), m, f64::INFINITY));
            if nu < 0.5 {
                // At ν = 1/2 the first ratio is exactly √(π/2)|cos s|, whose supremum
                // sits at s → 0, so an endpoint maximum is expected there.
                let endpoint = if at > 0 && at < count - 1 { 0.0 } else { 1.0 };
                out.checks.push(Check::at_most(format!("nu={nu} ratio{} max at an endpoint", j + 1), endpoint, 0.0));
            }
            out.checks.push(Check::below(
                format!("nu={nu} ratio{} dense/half max - 1", j + 1),
                m / half[j] - 1.0,
                0.01,
            ));
            out.table.push(row(&[
                ("nu", nu),
                ("ratio", (j + 1) as f64),
                ("dense_max", m),
                ("half_max", half[j]),
                ("argmax_s", 10f64.powf(-4.0 + 8.0 * at as f64 / (count - 1) as f64)),
            ]));
        }
    }
    Ok(out)
}

/// `det N₀ = 1` at a few points off the interval.
pub fn global_parametrix_identities(prec: u32) -> Result<Outcome> {
    let mut out = Outcome::default();
    for (re, im) in [(0.0, 2.0), (1.5, 0.0), (-0.4, 0.3)] {
        let z = BigComplex::from_f64(re, im, prec);
        let d = det2(&n0_matrix(&z)?).dist(&BigComplex::one(prec)).to_f64();
        out.checks.push(Check::at_most(format!("det N0 z=({re},{im})"), d, 1e-25));
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Equilibrium,
    Parametrix,
    Smallnorm,
    Quadrature,
    Zeros,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Equilibrium => "equilibrium",
            Suite::Parametrix => "parametrix",
            Suite::Smallnorm => "smallnorm",
            Suite::Quadrature => "quadrature",
            Suite::Zeros => "zeros",
        }
    }

    pub fn default_prec(self) -> u32 {
        match self {
            Suite::Equilibrium => 256,
            Suite::Parametrix => 128,
            Suite::Smallnorm => 96,
            Suite::Quadrature => 512,
            Suite::Zeros => 256,
        }
    }
}

impl FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "equilibrium" => Suite::Equilibrium,
            "parametrix" => Suite::Parametrix,
            "smallnorm" => Suite::Smallnorm,
            "quadrature" => Suite::Quadrature,
            "zeros" => Suite::Zeros,
            _ => return Err(Error::InvalidInput(format!("unknown suite {s:?}"))),
        })
    }
}

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub nu: Option<f64>,
    pub n_list: Option<Vec<usize>>,
    pub prec: Option<u32>,
    pub cap: u32,
    pub exec: Exec,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            nu: None,
            n_list: None,
            prec: None,
            cap: DEFAULT_PREC_CAP,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub nu: Vec<f64>,
    pub n_list: Vec<usize>,
    pub prec: u32,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub table: Vec<Row>,
    pub wall_seconds: f64,
}

pub const OUTER_POINTS: [(f64, f64); 3] = [(0.0, 2.0), (1.5, 0.0), (-1.5, 0.5)];
pub const INNER_POINTS: [f64; 3] = [0.3, 0.5, 0.7];

pub fn run_suite(suite: Suite, opts: &VerifyOptions) -> Result<SuiteReport> {
    let t0 = Instant::now();
    let prec = opts.prec.unwrap_or(suite.default_prec());
    let ns = |d: &[usize]| opts.n_list.clone().unwrap_or_else(|| d.to_vec());
    let nus = |d: &[f64]| opts.nu.map(|v| vec![v]).unwrap_or_else(|| d.to_vec());
    let mut out = Outcome::default();
    let (nu_used, n_used) = match suite {
        Suite::Equilibrium => {
            out.absorb(equilibrium_identities(prec)?);
            (vec![], vec![])
        }
        Suite::Parametrix => {
            let nu = opts.nu.unwrap_or(0.25);
            let n_list = ns(&[8, 16, 32]);
            let cache = BuildCache::new(prec, opts.cap, opts.exec);
            out.absorb(global_parametrix_identities(prec)?);
            out.absorb(outer_trend(&cache, nu, &n_list, &OUTER_POINTS)?);
            let inner_ns: Vec<usize> = n_list.iter().copied().filter(|&n| n >= 16).collect();
            if !inner_ns.is_empty() {
                out.absorb(inner_trend(&cache, nu, &inner_ns, &INNER_POINTS)?);
            }
            out.absorb(szego_limits(nu, &[25, 50, 100, 200], prec, opts.exec)?);
            (vec![nu], n_list)
        }
        Suite::Smallnorm => {
            let nu_list = nus(&[0.25, 0.5]);
            let n_list = ns(&[16, 32, 64, 128]);
            for &nu in &nu_list {
                out.absorb(smallnorm_trend(nu, &n_list, prec, opts.exec)?);
                out.absorb(eta_trend(nu, &n_list[..n_list.len().min(2)], &[0.01, 0.05, 0.1], prec)?);
            }
            let mut sweep_nus = vec![0.1, 0.25, 0.5];
            if let Some(v) = opts.nu {
                if v > 0.0 && v <= 0.5 && !sweep_nus.contains(&v) {
                    sweep_nus.push(v);
                }
            }
            out.absorb(bessel_ratio_sweep(&sweep_nus, 1000, 64)?);
            (nu_list, n_list)
        }
        Suite::Quadrature => {
            let nu_list = nus(&[0.0, 0.25, 0.5]);
            let n_list = ns(&(1..=10).collect::<Vec<_>>());
            let tol = 10f64.powf(-0.15 * f64::from(prec));
            out.absorb(quadrature_exactness(&n_list, &nu_list, prec, opts.cap, opts.exec, tol)?);
            (nu_list, n_list)
        }
        Suite::Zeros => {
            let nu = opts.nu.unwrap_or(0.25);
            let cache = BuildCache::new(prec, opts.cap, opts.exec);
            if nu == 0.0 {
                let n_list = ns(&[2, 4, 8, 16, 32]);
                out.absorb(imaginary_axis_law(&cache, &n_list, 1e-20)?);
                (vec![nu], n_list)
            } else {
                let n_list = ns(&[16, 32, 64]);
                out.absorb(zero_line_trend(&cache, nu, &n_list, 0.2)?);
                out.absorb(weak_convergence(&cache, nu, &n_list, 0.25)?);
                (vec![nu], n_list)
            }
        }
    };
    Ok(SuiteReport {
        suite,
        nu: nu_used,
        n_list: n_used,
        prec,
        passed: out.passed(),
        checks: out.checks,
        table: out.table,
        wall_seconds: t0.elapsed().as_secs_f64(),
    })
}
