//! Benchmarks for the hot paths: flag filtration construction, boundary
//! reduction, bottleneck matching, and spread enumeration.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use vrcalc::algebra::oracle_circle;
use vrcalc::bottleneck::bottleneck;
use vrcalc::complex::vr_filtration;
use vrcalc::invariants::spread;
use vrcalc::metric::{sample_circle, sample_sphere};
use vrcalc::persistence::compute_barcode;

fn bench_vr_filtration(c: &mut Criterion) {
    let mut group = c.benchmark_group("vr_filtration");
    for n in [16usize, 32, 64] {
        let d = sample_circle(n, 1.0).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(n), &d, |b, d| {
            b.iter(|| vr_filtration(black_box(d), 2, f64::INFINITY).unwrap())
        });
    }
    group.finish();
}

fn bench_barcode(c: &mut Criterion) {
    let mut group = c.benchmark_group("compute_barcode");
    for n in [16usize, 32, 64] {
        let d = sample_circle(n, 1.0).unwrap();
        let f = vr_filtration(&d, 2, f64::INFINITY).unwrap();
        group.bench_with_input(BenchmarkId::new("circle", n), &f, |b, f| {
            b.iter(|| compute_barcode(black_box(f), 2, 1).unwrap())
        });
    }
    let d = sample_sphere(48, 2, 3).unwrap();
    let f = vr_filtration(&d, 3, 2.2).unwrap();
    group.bench_with_input(BenchmarkId::new("sphere", 48), &f, |b, f| {
        b.iter(|| compute_barcode(black_box(f), 2, 2).unwrap())
    });
    group.finish();
}

fn bench_bottleneck(c: &mut Criterion) {
    let a = oracle_circle(1.0, 20, 2).unwrap();
    let b = oracle_circle(1.05, 20, 2).unwrap();
    let left: Vec<_> = a
        .intervals()
        .iter()
        .filter(|i| !i.is_essential())
        .cloned()
        .collect();
    let right: Vec<_> = b
        .intervals()
        .iter()
        .filter(|i| !i.is_essential())
        .cloned()
        .collect();
    c.bench_function("bottleneck_oracle_pair", |bench| {
        bench.iter(|| bottleneck(black_box(&left), black_box(&right)))
    });
}

fn bench_spread(c: &mut Criterion) {
    let d = sample_circle(12, 1.0).unwrap();
    c.bench_function("spread_exact_n12", |bench| {
        bench.iter(|| spread(black_box(&d), 12).unwrap())
    });
}

criterion_group!(
    benches,
    bench_vr_filtration,
    bench_barcode,
    bench_bottleneck,
    bench_spread
);
criterion_main!(benches);
