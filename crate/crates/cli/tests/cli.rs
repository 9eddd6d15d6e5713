use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn oscq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oscq"))
        .args(args)
        .env_remove("OSCQ_PREC_CAP")
        .output()
        .expect("binary runs")
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(str::to_string).collect()).collect()
}

fn manifest(path: &Path) -> Value {
    let mut s = path.as_os_str().to_owned();
    s.push(".manifest.json");
    serde_json::from_slice(&std::fs::read(PathBuf::from(s)).unwrap()).unwrap()
}

fn out(dir: &tempfile::TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

#[test]
fn nu_zero_zeros_on_imaginary_axis() {
    let d = tempfile::tempdir().unwrap();
    let p = out(&d, "z.csv");
    let o = oscq(&["zeros", "--nu", "0", "--n", "4", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = rows(&p);
    assert_eq!(rs.len(), 4);
    for r in &rs {
        assert!(r[1].parse::<f64>().unwrap().abs() <= 1e-20, "{r:?}");
    }
    let m = manifest(&p);
    assert_eq!(m["command"], "zeros");
    assert_eq!(m["n"], 4);
    assert!(m["residuals"]["max_abs_re"].as_f64().unwrap() <= 1e-20);
}

#[test]
fn zeros_csv_is_deterministic_and_sized() {
    let d = tempfile::tempdir().unwrap();
    let (a, b) = (out(&d, "a.csv"), out(&d, "b.csv"));
    for p in [&a, &b] {
        let o = oscq(&["zeros", "--nu", "0.25", "--n", "12", "--prec", "160", "--out", p.to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let rs = rows(&a);
    assert_eq!(rs.len(), 12);
    // 160 bits → ⌈160·log10 2⌉ + 2 = 51 significant digits.
    let mant = rs[0][3].trim_start_matches('-').split('e').next().unwrap().replace('.', "");
    assert_eq!(mant.len(), 51);
    let zl = &manifest(&a)["residuals"]["zero_line"];
    assert!(zl["max_dev_over_epsilon_n"].as_f64().unwrap().is_finite());
    assert!(zl["retained"].as_u64().unwrap() >= 1);
}

#[test]
fn long_runs_need_the_flag() {
    let d = tempfile::tempdir().unwrap();
    let p = out(&d, "z.csv");
    let o = oscq(&["zeros", "--nu", "0.25", "--n", "65", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!p.exists());
}

#[test]
fn bad_input_is_a_domain_error() {
    assert_eq!(oscq(&["zeros", "--nu", "1.0", "--n", "4", "--out", "x.csv"]).status.code(), Some(4));
    assert_eq!(oscq(&["verify", "--suite", "nonesuch"]).status.code(), Some(4));
    assert_eq!(oscq(&["verify", "--suite", "quadrature", "--n-list", "3..1"]).status.code(), Some(4));
    let o = Command::new(env!("CARGO_BIN_EXE_oscq"))
        .args(["zeros", "--nu", "0", "--n", "4", "--out", "x.csv"])
        .env("OSCQ_PREC_CAP", "lots")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn precision_cap_reached_is_indeterminate() {
    let d = tempfile::tempdir().unwrap();
    let p = out(&d, "z.csv");
    let o = Command::new(env!("CARGO_BIN_EXE_oscq"))
        .args(["zeros", "--nu", "0.25", "--n", "32", "--out", p.to_str().unwrap()])
        .env("OSCQ_PREC_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn outer_point_on_the_cut_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let pts = out(&d, "pts.csv");
    std::fs::write(&pts, "re,im\n2,1\n0.5,0\n").unwrap();
    let p = out(&d, "o.csv");
    let o = oscq(&[
        "asymptotics", "--nu", "0.25", "--n", "8", "--points", pts.to_str().unwrap(), "--regime", "outer", "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(4));
    assert!(!p.exists());
}

#[test]
fn outer_error_shrinks_at_2i() {
    let d = tempfile::tempdir().unwrap();
    let mut errs = Vec::new();
    for n in ["8", "16", "32"] {
        let p = out(&d, &format!("o{n}.csv"));
        let o = oscq(&[
            "asymptotics", "--nu", "0.25", "--n", n, "--points", "grid:0:0:1:2:2:1", "--regime", "outer", "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(o.status.code(), Some(0));
        let rs = rows(&p);
        assert_eq!(rs.len(), 1);
        errs.push(rs[0][6].parse::<f64>().unwrap());
    }
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn inner_grid_rows_and_scale() {
    let d = tempfile::tempdir().unwrap();
    let p = out(&d, "i.csv");
    let o = oscq(&[
        "asymptotics", "--nu", "0.25", "--n", "16", "--points", "grid", "--regime", "inner", "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rs = rows(&p);
    assert_eq!(rs.len(), 14);
    let at_half = rs.iter().find(|r| r[0].parse::<f64>().unwrap() == 0.5).unwrap();
    let (rel, scale): (f64, f64) = (at_half[6].parse().unwrap(), at_half[7].parse().unwrap());
    assert!(rel <= scale, "{rel} > {scale}");
    assert_eq!(manifest(&p)["residuals"]["points"], 14);
}

#[test]
fn verify_quadrature_report() {
    let d = tempfile::tempdir().unwrap();
    let p = out(&d, "q.json");
    let o = oscq(&["verify", "--suite", "quadrature", "--n-list", "1..4", "--prec", "256", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&std::fs::read(&p).unwrap()).unwrap();
    assert_eq!(v["report"]["passed"], true);
    assert_eq!(v["report"]["n_list"].as_array().unwrap().len(), 4);
    assert_eq!(v["manifest"]["command"], "verify");
    let checks = v["report"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["measured"].is_number() && c["threshold"].is_number()));
    assert!(!v["report"]["table"].as_array().unwrap().is_empty());
}
