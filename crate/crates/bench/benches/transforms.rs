use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use biphoton::fourier::{ft2, ft2_separable_rotated};
use biphoton::spectral::{sinc, SimplifiedJsaParams};
use biphoton_bench::{freq_axis, two_mode_jsa};
use num_complex::Complex64;

fn bench_ft2(c: &mut Criterion) {
    let mut group = c.benchmark_group("ft2");
    for n in [256usize, 512, 1024] {
        let f = two_mode_jsa(n, 16.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| ft2(black_box(f)).unwrap())
        });
    }
    group.finish();
}

fn bench_rotated_fast_path(c: &mut Criterion) {
    let s = SimplifiedJsaParams::DEFAULT;
    let mut group = c.benchmark_group("rotated-separable");
    for n in [256usize, 512, 1024] {
        let ax = freq_axis(n, 16.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &ax, |b, ax| {
            b.iter(|| {
                ft2_separable_rotated(
                    black_box(ax),
                    black_box(ax),
                    |u| Complex64::new((-s.a * u * u).exp(), 0.0),
                    |v| Complex64::new(sinc(s.b * v), 0.0),
                )
                .unwrap()
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_ft2, bench_rotated_fast_path);
criterion_main!(benches);
