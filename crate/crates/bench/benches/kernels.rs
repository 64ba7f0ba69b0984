use std::f64::consts::{FRAC_PI_2, PI};
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use equisep::*;

fn determinants(c: &mut Criterion) {
    let mut g = c.benchmark_group("determinant");
    for n in [3usize, 12, 31] {
        let a = InnerProduct::new(0.5 * boundary_modulus(n, 2.0).unwrap(), 2.0).unwrap();
        g.bench_with_input(BenchmarkId::new("closed_form", n), &n, |b, &n| {
            b.iter(|| det_closed_form(n, black_box(a)).unwrap())
        });
        let gram = build_gram(n, a).unwrap();
        g.bench_with_input(BenchmarkId::new("lu", n), &gram, |b, gram| {
            b.iter(|| det_numeric(black_box(gram)))
        });
    }
    g.finish();
}

fn grids(c: &mut Criterion) {
    let mut g = c.benchmark_group("petal_grid");
    g.sample_size(10);
    for n in [3usize, 31] {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            b.iter(|| petal_grid(n, 256).unwrap())
        });
    }
    g.finish();
}

fn constructions(c: &mut Criterion) {
    let mut g = c.benchmark_group("construction");
    for n in [3usize, 12] {
        let a =
            InnerProduct::new(0.5 * boundary_modulus(n, FRAC_PI_2).unwrap(), FRAC_PI_2).unwrap();
        g.bench_with_input(BenchmarkId::new("isometry", n), &n, |b, &n| {
            b.iter(|| build_isometry(n, black_box(a)).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("srm", n), &n, |b, &n| {
            b.iter(|| build_srm(n, black_box(FRAC_PI_2)).unwrap())
        });
    }
    g.finish();
}

fn simulation(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_trials");
    g.sample_size(10);
    let a = InnerProduct::new(1.0 / 6.0, PI).unwrap();
    g.bench_function("n7_1e5", |b| {
        b.iter(|| run_trials(7, a, &uniform_priors(7), 100_000, black_box(7)).unwrap())
    });
    g.finish();
}

criterion_group!(benches, determinants, grids, constructions, simulation);
criterion_main!(benches);
