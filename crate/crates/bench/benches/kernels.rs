use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use hmcreal::transcendence::{hilbert_row, CandidateRelation, Route};
use hmcreal::{fps, northeast, quadrature, series, BigRational, CReal};

fn monomial(k: usize) -> Vec<CReal> {
    let mut p = vec![CReal::zero(); k];
    p.push(CReal::one());
    p
}

fn e_digits(c: &mut Criterion) {
    // e() is cached; the series and fixed-point paths are not
    let mut g = c.benchmark_group("e_digits");
    let half = BigRational::new(1.into(), 2.into());
    g.sample_size(10);
    for bits in [64u32, 256] {
        g.bench_with_input(BenchmarkId::new("series", bits), &bits, |b, &bits| {
            b.iter(|| series::sum(&series::exp_series(&CReal::one())).approx_bits(black_box(bits)))
        });
    }
    for bits in [64u32, 1024, 8192] {
        g.bench_with_input(BenchmarkId::new("exp_half", bits), &bits, |b, &bits| {
            b.iter(|| series::exp_rational(&half).approx_bits(black_box(bits)))
        });
    }
    g.finish();
}

fn euler_routes(c: &mut Criterion) {
    let mut g = c.benchmark_group("euler");
    g.sample_size(10);
    for k in [1usize, 3] {
        g.bench_with_input(BenchmarkId::new("newton", k), &k, |b, &k| {
            b.iter(|| fps::newton_improper_polyexp(&monomial(k), 100).approx_bits(16))
        });
        g.bench_with_input(BenchmarkId::new("riemann", k), &k, |b, &k| {
            b.iter(|| quadrature::integrate_improper_polyexp(&monomial(k), 100).unwrap().approx_bits(16))
        });
    }
    g.finish();
}

fn hilbert(c: &mut Criterion) {
    let rel = CandidateRelation::from_i64(&[1, -1, 1]).unwrap();
    let mut g = c.benchmark_group("hilbert_row");
    for m in [2usize, 6] {
        g.bench_with_input(BenchmarkId::from_parameter(m), &m, |b, &m| {
            b.iter(|| hilbert_row(&rel, m, Route::Newton).unwrap())
        });
    }
    g.finish();
}

fn stages(c: &mut Criterion) {
    let mut g = c.benchmark_group("build_stage");
    for n in [4u64, 8, 12] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| northeast::build_stage(n).unwrap()));
    }
    g.finish();
}

fn fps_product(c: &mut Criterion) {
    c.bench_function("fps_cauchy_product_30", |b| {
        b.iter(|| {
            let p = fps::cauchy_product(&fps::exp(), &fps::exp());
            p.coeffs(30).iter().map(|x| x.approx_bits(64)).collect::<Vec<_>>()
        })
    });
}

criterion_group!(benches, e_digits, euler_routes, hilbert, stages, fps_product);
criterion_main!(benches);
