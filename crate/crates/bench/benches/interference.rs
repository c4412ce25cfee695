use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use biphoton::interference::hom_scan;
use biphoton_bench::two_mode_jsa;

fn bench_hom_scan(c: &mut Criterion) {
    let delays: Vec<f64> = (0..601).map(|i| -15.0 + 0.05 * i as f64).collect();
    let mut group = c.benchmark_group("hom-scan-601-delays");
    for n in [128usize, 256, 512] {
        let f = two_mode_jsa(n, 16.0);
        group.bench_with_input(BenchmarkId::from_parameter(n), &f, |b, f| {
            b.iter(|| hom_scan(black_box(f), black_box(&delays)).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, bench_hom_scan);
criterion_main!(benches);
