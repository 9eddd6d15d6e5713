//! The three subcommands.

use std::path::Path;
use std::time::Instant;

use oscq::equilibrium::in_validated_box;
use oscq::moments::{monic_adaptive, rescale_to_tilde, DEFAULT_PREC_CAP};
use oscq::parametrix::{inner_eval, outer_eval};
use oscq::verify::{run_suite, Suite, VerifyOptions};
use oscq::zeros::{tilde_zeros, to_raw_roots, vieta_defects, zero_line_stats};
use oscq::{BigComplex, BigReal, Error, Exec};
use serde_json::json;

use crate::fail::{Failure, EXIT_CHECK_FAILED};
use crate::manifest::{manifest_path, write_atomic, write_json, Precision, RunManifest};
use crate::{AsymptoticsArgs, PrecArg, RegimeArg, VerifyArgs, ZerosArgs, DESK_MAX_N};

pub const PREC_CAP_VAR: &str = "OSCQ_PREC_CAP";

/// The escalation cap, from `OSCQ_PREC_CAP` when set.
pub fn prec_cap() -> Result<u32, Failure> {
    match std::env::var(PREC_CAP_VAR) {
        Ok(v) => match v.trim().parse::<u32>() {
            Ok(b) if b >= 64 => Ok(b),
            _ => Err(Failure::domain(format!("{PREC_CAP_VAR} must be a bit count >= 64, got {v:?}"))),
        },
        Err(_) => Ok(DEFAULT_PREC_CAP),
    }
}

fn check_nu_n(nu: f64, n: usize, allow_long: bool) -> Result<(), Failure> {
    if !(0.0..1.0).contains(&nu) {
        return Err(Failure::domain(format!("nu must lie in [0, 1), got {nu}")));
    }
    if n == 0 {
        return Err(Failure::domain("n must be at least 1"));
    }
    if n > DESK_MAX_N && !allow_long {
        return Err(Failure::domain(format!("n = {n} exceeds {DESK_MAX_N}; pass --allow-long")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<(), Failure> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Failure::domain(format!("delta must lie in (0, 1/2), got {delta}")))
    }
}

fn csv_bytes(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, Failure> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let err = |e: csv::Error| Failure::solver(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    w.into_inner().map_err(|e| Failure::solver(e.to_string()))
}

fn file_name(p: &Path) -> String {
    p.file_name().map_or_else(|| p.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn dec(x: &BigReal, prec: u32) -> String {
    x.with_prec(prec).to_string()
}

/// `auto`: room for the growth of the coefficients with n.
fn zeros_prec(p: PrecArg, n: usize) -> u32 {
    match p {
        PrecArg::Bits(b) => b,
        PrecArg::Auto => 128.max(64 + 2 * n as u32),
    }
}

pub fn zeros(a: &ZerosArgs) -> Result<i32, Failure> {
    let t0 = Instant::now();
    check_nu_n(a.nu, a.n, a.allow_long)?;
    check_delta(a.delta)?;
    let cap = prec_cap()?;
    let prec = zeros_prec(a.prec, a.n);
    let nu = BigReal::from_f64(a.nu, prec);

    let (build, zs) = tilde_zeros(a.n, &nu, prec, cap, Exec::default())?;
    let raw = to_raw_roots(&zs, a.n);
    let mut order: Vec<usize> = (0..zs.len()).collect();
    order.sort_by(|&i, &j| {
        let (u, v) = (&zs.roots[i], &zs.roots[j]);
        u.re.partial_cmp(&v.re).unwrap_or(std::cmp::Ordering::Equal).then(
            u.im.partial_cmp(&v.im).unwrap_or(std::cmp::Ordering::Equal),
        )
    });
    let rows: Vec<Vec<String>> = order
        .iter()
        .enumerate()
        .map(|(k, &i)| {
            vec![
                k.to_string(),
                dec(&raw[i].re, prec),
                dec(&raw[i].im, prec),
                dec(&zs.roots[i].re, prec),
                dec(&zs.roots[i].im, prec),
                dec(&zs.residuals[i], prec),
            ]
        })
        .collect();
    let csv = csv_bytes(&["index", "re", "im", "re_w", "im_w", "residual"], &rows)?;

    let pt = rescale_to_tilde(&build.poly);
    let v = vieta_defects(&zs, &pt);
    let mut residuals = json!({
        "max_newton_residual": zs.max_residual().to_f64(),
        "hankel_relative_residual": build.relative_residual.to_f64(),
        "vieta_sum_relative": (&v.sum / &v.sum_scale).to_f64(),
        "vieta_product_relative": (&v.product / &v.product_scale).to_f64(),
        "root_sweeps": zs.iterations,
    });
    if a.nu == 0.0 {
        let worst = raw.iter().map(|x| x.re.abs().to_f64()).fold(0.0, f64::max);
        residuals["max_abs_re"] = json!(worst);
    } else {
        residuals["zero_line"] = match zero_line_stats(&zs, a.n, &nu, a.delta) {
            Ok(st) => json!({
                "line": a.nu * std::f64::consts::FRAC_PI_2,
                "max_dev": st.max_dev,
                "epsilon_n": st.epsilon_n,
                "max_dev_over_epsilon_n": st.max_dev / st.epsilon_n,
                "retained": st.zeros_considered,
            }),
            Err(Error::EmptySet(_)) => json!(null),
            Err(e) => return Err(e.into()),
        };
    }

    let mut m = RunManifest::new(
        "zeros",
        Precision {
            requested: match a.prec {
                PrecArg::Bits(b) => Some(b),
                PrecArg::Auto => None,
            },
            output_bits: prec,
            build_bits: Some(build.work_prec),
            root_bits: Some(zs.work_prec),
            cap,
        },
    );
    m.nu = Some(a.nu);
    m.n = Some(a.n);
    m.delta = Some(a.delta);
    m.residuals = residuals;
    m.outputs = vec![file_name(&a.out)];
    write_atomic(&a.out, &csv)?;
    m.wall_seconds = t0.elapsed().as_secs_f64();
    write_json(&manifest_path(&a.out), &m)?;
    Ok(0)
}

/// `16,32,64` or an inclusive range `1..10`.
pub fn parse_n_list(s: &str) -> Result<Vec<usize>, Failure> {
    let bad = || Failure::domain(format!("cannot read n-list {s:?}"));
    let out: Vec<usize> = if let Some((a, b)) = s.split_once("..") {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().trim_start_matches('=').parse().map_err(|_| bad())?;
        if a > b {
            return Err(bad());
        }
        (a..=b).collect()
    } else {
        s.split(',').map(|t| t.trim().parse::<usize>().map_err(|_| bad())).collect::<Result<_, _>>()?
    };
    if out.is_empty() || out.contains(&0) {
        return Err(bad());
    }
    Ok(out)
}

pub fn verify(a: &VerifyArgs) -> Result<i32, Failure> {
    let t0 = Instant::now();
    let suite: Suite = a.suite.parse()?;
    if let Some(nu) = a.nu {
        check_nu_n(nu, 1, false)?;
    }
    let n_list = a.n_list.as_deref().map(parse_n_list).transpose()?;
    let cap = prec_cap()?;
    let opts = VerifyOptions {
        nu: a.nu,
        n_list,
        prec: a.prec,
        cap,
        exec: Exec::default(),
    };
    let report = run_suite(suite, &opts)?;
    let mut m = RunManifest::new(
        "verify",
        Precision {
            requested: a.prec,
            output_bits: report.prec,
            build_bits: None,
            root_bits: None,
            cap,
        },
    );
    m.nu = a.nu;
    m.n_list = Some(report.n_list.clone());
    let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
    m.residuals = json!({ "checks": report.checks.len(), "failed": failed.len() });
    m.wall_seconds = t0.elapsed().as_secs_f64();
    let doc = json!({ "manifest": m, "report": report });
    match &a.out {
        Some(p) => write_json(p, &doc)?,
        None => println!("{}", serde_json::to_string_pretty(&doc).map_err(|e| Failure::solver(e.to_string()))?),
    }
    for f in &failed {
        eprintln!("FAIL {f}");
    }
    eprintln!(
        "{}: {} of {} checks passed",
        suite.name(),
        report.checks.len() - failed.len(),
        report.checks.len()
    );
    Ok(if report.passed { 0 } else { EXIT_CHECK_FAILED })
}

fn linspace(a: f64, b: f64, k: usize) -> Vec<f64> {
    match k {
        0 => vec![],
        1 => vec![a],
        _ => (0..k).map(|i| a + (b - a) * i as f64 / (k - 1) as f64).collect(),
    }
}

/// Points as decimal strings, parsed later at the working precision.
pub fn read_points(src: &str, regime: RegimeArg) -> Result<Vec<(String, String)>, Failure> {
    let grid = |re: Vec<f64>, im: Vec<f64>| {
        re.iter().flat_map(|r| im.iter().map(move |i| (r.to_string(), i.to_string()))).collect()
    };
    if src == "grid" {
        return Ok(match regime {
            RegimeArg::Outer => grid(vec![-2.0, -1.0, 0.0, 1.0, 2.0], vec![0.5, 1.0, 2.0]),
            RegimeArg::Inner => grid(
                [-0.8, -0.7, -0.6, -0.5, -0.4, -0.3, -0.2, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8].to_vec(),
                vec![0.0],
            ),
        });
    }
    if let Some(rest) = src.strip_prefix("grid:") {
        let f: Vec<&str> = rest.split(':').collect();
        let bad = || Failure::domain(format!("grid points must be grid:RE0:RE1:NRE:IM0:IM1:NIM, got {src:?}"));
        if f.len() != 6 {
            return Err(bad());
        }
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad());
        let cnt = |s: &str| s.parse::<usize>().map_err(|_| bad());
        return Ok(grid(
            linspace(num(f[0])?, num(f[1])?, cnt(f[2])?),
            linspace(num(f[3])?, num(f[4])?, cnt(f[5])?),
        ));
    }
    let path = Path::new(src);
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Failure::domain(format!("{src}: {e}")))?;
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| Failure::domain(format!("{src}: {e}")))?;
        let re = rec.get(0).unwrap_or("");
        if k == 0 && re.starts_with(|c: char| c.is_ascii_alphabetic()) {
            continue;
        }
        let im = rec.get(1).unwrap_or("0");
        if rec.len() > 2 || re.is_empty() {
            return Err(Failure::domain(format!("{src}: expected `re,im` on each line")));
        }
        out.push((re.to_string(), im.to_string()));
    }
    Ok(out)
}

fn dist_to_interval(re: f64, im: f64) -> f64 {
    (re - re.clamp(-1.0, 1.0)).hypot(im)
}

pub fn asymptotics(a: &AsymptoticsArgs) -> Result<i32, Failure> {
    let t0 = Instant::now();
    check_nu_n(a.nu, a.n, a.allow_long)?;
    check_delta(a.delta)?;
    let cap = prec_cap()?;
    let prec = match a.prec {
        PrecArg::Bits(b) => b,
        PrecArg::Auto => 128,
    };
    let nu = BigReal::from_f64(a.nu, prec);
    let pts = read_points(&a.points, a.regime)?;
    let mut zs = Vec::with_capacity(pts.len());
    for (re, im) in &pts {
        let parse = |s: &str| BigReal::parse(s, prec).ok_or_else(|| Failure::domain(format!("bad number {s:?}")));
        let z = BigComplex::new(parse(re)?, parse(im)?);
        let (x, y) = z.to_c64();
        let ok = z.is_finite()
            && match a.regime {
                RegimeArg::Outer => dist_to_interval(x, y) >= a.delta,
                RegimeArg::Inner => in_validated_box(&z, a.delta),
            };
        if !ok {
            return Err(Failure::domain(format!(
                "z = {re}{}{im}i is outside the {} domain (delta = {})",
                if im.starts_with('-') { "" } else { "+" },
                match a.regime {
                    RegimeArg::Outer => "outer",
                    RegimeArg::Inner => "inner",
                },
                a.delta
            )));
        }
        zs.push(z);
    }
    if zs.is_empty() {
        return Err(Failure::domain("no points"));
    }

    let build = monic_adaptive(a.n, &nu, prec + 4 * a.n as u32, cap)?;
    let pt = rescale_to_tilde(&build.poly);
    let rows = Exec::default().try_map(&zs, |z| -> oscq::Result<(Vec<String>, f64, f64)> {
        let act = pt.eval(&z.with_prec(pt.prec())).with_prec(prec);
        let (pred, rel) = match a.regime {
            RegimeArg::Outer => {
                let p = outer_eval(z, a.n, &nu, prec)?;
                let r = (&act / &p.value - BigComplex::one(prec)).abs();
                (p, r)
            }
            RegimeArg::Inner => {
                let p = inner_eval(z, a.n, &nu, prec)?;
                let scale = p.inner.as_ref().map_or_else(|| p.value.abs(), |q| q.prefactor.abs());
                let r = act.dist(&p.value) / scale;
                (p, r)
            }
        };
        let row = vec![
            dec(&z.re, prec),
            dec(&z.im, prec),
            dec(&pred.value.re, prec),
            dec(&pred.value.im, prec),
            dec(&act.re, prec),
            dec(&act.im, prec),
            dec(&rel, prec),
            dec(&pred.error_scale, prec),
        ];
        Ok((row, rel.to_f64(), pred.error_scale.to_f64()))
    })?;
    let header = ["z_re", "z_im", "pred_re", "pred_im", "actual_re", "actual_im", "rel_err", "error_scale"];
    let csv = csv_bytes(&header, &rows.iter().map(|r| r.0.clone()).collect::<Vec<_>>())?;
    let max_rel = rows.iter().map(|r| r.1).fold(0.0, f64::max);
    let max_ratio = rows.iter().map(|r| r.1 / r.2).fold(0.0, f64::max);

    let mut m = RunManifest::new(
        "asymptotics",
        Precision {
            requested: match a.prec {
                PrecArg::Bits(b) => Some(b),
                PrecArg::Auto => None,
            },
            output_bits: prec,
            build_bits: Some(build.work_prec),
            root_bits: None,
            cap,
        },
    );
    m.nu = Some(a.nu);
    m.n = Some(a.n);
    m.delta = Some(a.delta);
    m.residuals = json!({
        "regime": match a.regime { RegimeArg::Outer => "outer", RegimeArg::Inner => "inner" },
        "points": rows.len(),
        "max_rel_err": max_rel,
        "max_rel_err_over_error_scale": max_ratio,
        "hankel_relative_residual": build.relative_residual.to_f64(),
    });
    m.outputs = vec![file_name(&a.out)];
    write_atomic(&a.out, &csv)?;
    m.wall_seconds = t0.elapsed().as_secs_f64();
    write_json(&manifest_path(&a.out), &m)?;
    Ok(0)
}
