use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nlsd_bench::mar01;
use nlsd_core::basis::{orthonormalize, GeneratorGrid};
use nlsd_core::{chi2_quantile, nlsd_statistic, noncentral_chi2_cdf, NoncentralChiSquare, TransformSet};
use std::hint::black_box;

fn nlsd(c: &mut Criterion) {
    let ts = TransformSet::linear_and_square();
    let mut g = c.benchmark_group("nlsd_statistic");
    for t in [100, 500, 2000] {
        let (_, y) = mar01(0.5, t, 1);
        g.bench_with_input(BenchmarkId::from_parameter(t), &y, |b, y| b.iter(|| nlsd_statistic(black_box(y), &ts, 3).unwrap()));
    }
    g.finish();
}

fn distributions(c: &mut Criterion) {
    c.bench_function("chi2_quantile df=34", |b| b.iter(|| chi2_quantile(black_box(34.0), 0.95)));
    let d = NoncentralChiSquare::new(34.0, 12.0).unwrap();
    c.bench_function("noncentral_chi2_cdf df=34", |b| b.iter(|| noncentral_chi2_cdf(black_box(48.6), d).unwrap()));
}

fn basis(c: &mut Criterion) {
    let (spec, y) = mar01(0.3, 500, 2);
    let u = spec.residual_columns(&y).unwrap();
    let grid = GeneratorGrid::abs_powers(9, 0.01).unwrap();
    c.bench_function("orthonormalize K=9 T=500", |b| b.iter(|| orthonormalize(black_box(&u[0]), &grid, 0.018).unwrap()));
}

criterion_group!(benches, nlsd, distributions, basis);
criterion_main!(benches);
