//! Benchmark bodies, kept in a library so `cargo test` type-checks them.

use std::hint::black_box;

use boxaffine_core::quadrature::gauss_legendre;
use boxaffine_core::rayleigh_ritz::compute_spectrum;
use boxaffine_core::shooting::{Shooter, DEFAULT_OFFSET};
use boxaffine_core::ModelSpec;
use criterion::{BenchmarkId, Criterion};

pub fn quadrature(c: &mut Criterion) {
    let mut group = c.benchmark_group("gauss_legendre");
    for n in [16, 64, 256] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| gauss_legendre(black_box(n)).unwrap())
        });
    }
    group.finish();
}

pub fn rayleigh_ritz(c: &mut Criterion) {
    let model = ModelSpec::aq_box(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("rayleigh_ritz");
    for n in [16, 32, 48] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| compute_spectrum(black_box(&model), n).unwrap())
        });
    }
    group.finish();
}

pub fn shooting(c: &mut Criterion) {
    let model = ModelSpec::aq_box(1.0, 1.0).unwrap();
    let mut group = c.benchmark_group("shooting");
    group.sample_size(10);
    for m in [5_001, 20_001] {
        let shooter = Shooter::new(&model, m, DEFAULT_OFFSET).unwrap();
        group.bench_with_input(BenchmarkId::new("integrate", m), &shooter, |b, s| {
            b.iter(|| s.integrate(black_box(4.6)))
        });
        group.bench_with_input(BenchmarkId::new("ground_level", m), &shooter, |b, s| {
            b.iter(|| s.search(0, 1e-10).unwrap())
        });
    }
    group.finish();
}
