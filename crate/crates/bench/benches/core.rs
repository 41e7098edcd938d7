use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use lapprox_bench::Fixture;
use lapprox_core::approximation::{lambda_N, lambda_term, z_function, ApproxConfig, Mode};
use lapprox_core::euler::EulerProduct;
use lapprox_core::numerics::upper_incomplete_gamma;
use lapprox_core::regularization::PrincipalPartSet;
use lapprox_core::zerofinder::{scan_sign_changes, ZSource};

fn incgamma(c: &mut Criterion) {
    let mut g = c.benchmark_group("upper_incomplete_gamma");
    for bits in [64u32, 128, 256] {
        let f = Fixture::delta(bits, 10);
        let s = f.ctx.complex((6.0, 20.0));
        let a = f.ctx.real(2.0 * std::f64::consts::PI);
        g.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, _| {
            b.iter(|| upper_incomplete_gamma(&s, &a, &f.ctx).unwrap())
        });
    }
    g.finish();
}

fn series(c: &mut Criterion) {
    let f = Fixture::delta(128, 512);
    let s = f.ctx.complex((6.0, 15.0));
    c.bench_function("lambda_term n=3", |b| {
        b.iter(|| lambda_term(&s, 3, &f.spec, &f.ctx).unwrap())
    });
    let mut g = c.benchmark_group("lambda_N");
    for n in [1usize, 3] {
        let cfg = ApproxConfig::new(1e-25).unwrap().with_factors(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| lambda_N(&s, &f.table, &f.spec, &cfg, &f.ctx).unwrap())
        });
    }
    g.finish();
}

fn euler(c: &mut Criterion) {
    let f = Fixture::delta(128, 100);
    let s = f.ctx.complex((6.0, 15.0));
    let prod = EulerProduct::new(&f.spec, &f.table, 10, &f.ctx).unwrap();
    c.bench_function("euler product N=10", |b| b.iter(|| prod.eval(&s, &f.ctx).unwrap()));
}

fn principal_parts(c: &mut Criterion) {
    let f = Fixture::delta(96, 100);
    let mut g = c.benchmark_group("principal parts");
    g.sample_size(10);
    g.bench_function("build N=1 T=20", |b| {
        b.iter(|| PrincipalPartSet::build(1, 20.0, &f.table, &f.spec, &f.ctx).unwrap())
    });
    let set = PrincipalPartSet::build(1, 20.0, &f.table, &f.spec, &f.ctx).unwrap();
    let s = f.ctx.complex((6.0, 2.0));
    g.bench_function("lambda_n N=1 T=20", |b| b.iter(|| set.lambda_n(&s, &f.ctx).unwrap()));
    g.finish();
}

fn zscan(c: &mut Criterion) {
    let f = Fixture::delta(96, 512);
    let cfg = ApproxConfig::new(1e-15).unwrap();
    let mut g = c.benchmark_group("Z scan [8, 12] step 0.1");
    g.sample_size(10);
    for mode in [Mode::Full, Mode::Approx(3)] {
        let src = ZSource::new(mode, &f.table, &f.spec, &cfg, &f.ctx);
        let (lo, hi) = (f.ctx.real(8.0), f.ctx.real(12.0));
        g.bench_function(mode.to_string(), |b| {
            b.iter(|| scan_sign_changes(&lo, &hi, 0.1, &src).unwrap())
        });
        let t = f.ctx.real(10.0);
        g.bench_function(format!("{mode} single"), |b| {
            b.iter(|| z_function(&t, mode, &f.table, &f.spec, &cfg, &f.ctx).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, incgamma, series, euler, principal_parts, zscan);
criterion_main!(benches);
