use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use oscq::moments::{monic_adaptive, DEFAULT_PREC_CAP};
use oscq::smallnorm::{k_norm_bounds, CutoffChi};
use oscq::zeros::find_zeros_with;
use oscq::{BigReal, Exec};

fn aberth(c: &mut Criterion) {
    let prec = 256;
    let nu = BigReal::from_f64(0.25, prec);
    let mut g = c.benchmark_group("aberth");
    g.sample_size(10);
    for n in [16usize, 32] {
        let b = monic_adaptive(n, &nu, prec, DEFAULT_PREC_CAP).unwrap();
        for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
            g.bench_with_input(BenchmarkId::new(name, n), &b.poly, |bch, p| {
                bch.iter(|| find_zeros_with(p, prec, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn k_norms(c: &mut Criterion) {
    let prec = 64;
    let nu = BigReal::from_f64(0.25, prec);
    let chi = CutoffChi::standard(prec);
    let ns = [8usize, 16];
    let mut g = c.benchmark_group("k_norms");
    g.sample_size(10);
    for (name, exec) in [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)] {
        g.bench_function(name, |bch| {
            bch.iter(|| exec.try_map(&ns, |&n| k_norm_bounds(n, &nu, &chi, prec)).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, aberth, k_norms);
criterion_main!(benches);
