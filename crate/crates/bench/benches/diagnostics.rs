use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use ucurve::diagnostics::{default_bandwidth, kpss_test_values, ljung_box_values, qu_test_values, time_lag_values};
use ucurve::SeriesName;
use ucurve_bench::{differenced, levels};

fn bench(c: &mut Criterion) {
    let x = levels(SeriesName::MDReg);
    let dx = differenced(SeriesName::MDReg);
    let m = default_bandwidth(x.len());
    c.bench_function("kpss_triple", |b| b.iter(|| kpss_test_values(black_box(&x))));
    c.bench_function("ljung_box_30", |b| b.iter(|| ljung_box_values(black_box(&x), 30)));
    c.bench_function("time_lag", |b| b.iter(|| time_lag_values(black_box(&x))));
    c.bench_function("qu_test", |b| b.iter(|| qu_test_values(black_box(&dx), m)));
}

criterion_group!(benches, bench);
criterion_main!(benches);
