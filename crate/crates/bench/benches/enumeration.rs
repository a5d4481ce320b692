use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use otterlab_core::trees::{height_ladder, height_pmf, rooted_series, unrooted_series};
use otterlab_core::DiameterTable;

fn series(c: &mut Criterion) {
    let mut g = c.benchmark_group("series");
    for n in [500usize, 2000] {
        g.bench_with_input(BenchmarkId::new("rooted", n), &n, |b, &n| b.iter(|| rooted_series(black_box(n)).unwrap()));
        g.bench_with_input(BenchmarkId::new("unrooted", n), &n, |b, &n| b.iter(|| unrooted_series(black_box(n)).unwrap()));
    }
    g.finish();
}

fn ladders(c: &mut Criterion) {
    let mut g = c.benchmark_group("ladder");
    g.sample_size(10);
    for n in [100usize, 200, 400] {
        g.bench_with_input(BenchmarkId::new("height", n), &n, |b, &n| b.iter(|| height_ladder(n, n).unwrap()));
        g.bench_with_input(BenchmarkId::new("diameter", n), &n, |b, &n| {
            b.iter(|| DiameterTable::new(&height_ladder(n, n / 2).unwrap()).unwrap())
        });
    }
    let ladder = height_ladder(300, 300).unwrap();
    g.bench_function("height_pmf/300", |b| b.iter(|| height_pmf(&ladder, black_box(300)).unwrap()));
    g.finish();
}

criterion_group!(benches, series, ladders);
criterion_main!(benches);
