use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use otterlab_core::approx::{eval_eh_point, validate_eh};
use otterlab_core::constants::{lambda, rho, rho_f64};
use otterlab_core::deviations::rate_point;
use otterlab_core::limit_laws::{diam_density, diam_tail, theta_density, theta_tail};

fn theta(c: &mut Criterion) {
    let grid: Vec<f64> = (1..=120).map(|i| i as f64 / 10.0).collect();
    c.bench_function("theta_tail/grid", |b| b.iter(|| grid.iter().map(|&x| theta_tail(black_box(x)).unwrap()).sum::<f64>()));
    c.bench_function("theta_density/grid", |b| {
        b.iter(|| grid.iter().map(|&x| theta_density(black_box(x)).unwrap()).sum::<f64>())
    });
    c.bench_function("diam_tail/grid", |b| b.iter(|| grid.iter().map(|&x| diam_tail(black_box(x)).unwrap()).sum::<f64>()));
    c.bench_function("diam_density/grid", |b| {
        b.iter(|| grid.iter().map(|&x| diam_density(black_box(x)).unwrap()).sum::<f64>())
    });
}

fn constants(c: &mut Criterion) {
    let mut g = c.benchmark_group("constants");
    g.sample_size(10);
    g.bench_function("rho/1e-30", |b| b.iter(|| rho(black_box(240), 1e-30).unwrap()));
    g.bench_function("lambda/1e-30", |b| b.iter(|| lambda(black_box(240), 1e-30).unwrap()));
    g.finish();
}

fn real_axis(c: &mut Criterion) {
    c.bench_function("rate_point", |b| b.iter(|| rate_point(black_box(0.5)).unwrap()));
    c.bench_function("eh/rho/200", |b| b.iter(|| eval_eh_point(rho_f64(), black_box(200)).unwrap()));
    let grid: Vec<(f64, usize)> = [50, 100, 200].iter().map(|&h| (rho_f64(), h)).collect();
    c.bench_function("validate_eh", |b| b.iter(|| validate_eh(black_box(&grid)).unwrap()));
}

criterion_group!(benches, theta, constants, real_axis);
criterion_main!(benches);
