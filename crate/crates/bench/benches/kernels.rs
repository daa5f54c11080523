use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use harmlab::fourier::forward;
use harmlab::geometry::{whitney, ClosedSetMask};
use harmlab::maximal::hl_maximal;
use harmlab::{generate, GeneratorSpec, Grid};

fn fft(c: &mut Criterion) {
    let mut group = c.benchmark_group("forward");
    for (d, n) in [(1, 4096), (2, 256), (3, 32)] {
        let grid = Grid::new(d, n, 16.0).unwrap();
        let f = generate(&grid, &GeneratorSpec::RandomGaussian { seed: 1 }).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &f, |b, f| b.iter(|| forward(f).unwrap()));
    }
    group.finish();
}

fn maximal(c: &mut Criterion) {
    let mut group = c.benchmark_group("hl_maximal");
    for (d, n) in [(1, 1024), (2, 64)] {
        let grid = Grid::new(d, n, 16.0).unwrap();
        let f = generate(&grid, &GeneratorSpec::RandomGaussian { seed: 2 }).unwrap();
        group.bench_with_input(BenchmarkId::new(format!("d{d}"), n), &f, |b, f| b.iter(|| hl_maximal(f).unwrap()));
    }
    group.finish();
}

fn whitney_2d(c: &mut Criterion) {
    let grid = Grid::new(2, 512, 1.0).unwrap();
    let mask = ClosedSetMask::random(grid, 7);
    c.bench_function("whitney/512", |b| b.iter(|| whitney(&mask, 9).unwrap()));
    c.bench_function("distance/512", |b| b.iter(|| ClosedSetMask::random(grid, 7)));
}

criterion_group!(benches, fft, maximal, whitney_2d);
criterion_main!(benches);
