use std::hint::black_box;

use crashpbo::acquisition::{eubo_value, maximize_eubo, AcquisitionConfig, ComparisonMode};
use crashpbo::gp::{fit_laplace, KernelConfig, NoiseConfig};
use crashpbo_bench::chain_dataset;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn laplace_fit(c: &mut Criterion) {
    let kernel = KernelConfig::isotropic(0.3, 1.0);
    let noise = NoiseConfig { sigma: 0.1 };
    let mut group = c.benchmark_group("laplace_fit");
    for duels in [10, 40, 120] {
        let data = chain_dataset(duels, 2, 1);
        group.bench_with_input(BenchmarkId::from_parameter(duels), &data, |b, data| {
            b.iter(|| fit_laplace(black_box(data), &kernel, &noise).unwrap())
        });
    }
    group.finish();
}

fn acquisition(c: &mut Criterion) {
    let kernel = KernelConfig::isotropic(0.3, 1.0);
    let noise = NoiseConfig { sigma: 0.1 };
    let data = chain_dataset(30, 2, 2);
    let posterior = fit_laplace(&data, &kernel, &noise).unwrap();
    c.bench_function("eubo_value", |b| {
        b.iter(|| eubo_value(&posterior, black_box(&[0.2, 0.4]), black_box(&[0.7, 0.1])).unwrap())
    });
    let config = AcquisitionConfig::default();
    let anchor = data.points()[0].clone();
    let mut group = c.benchmark_group("maximize_eubo");
    group.sample_size(10);
    group.bench_function("two_new", |b| {
        b.iter(|| maximize_eubo(&posterior, ComparisonMode::TwoNew, None, &config).unwrap())
    });
    group.bench_function("compare_to_best", |b| {
        b.iter(|| maximize_eubo(&posterior, ComparisonMode::CompareToBest, Some(&anchor), &config).unwrap())
    });
    group.finish();
}

criterion_group!(benches, laplace_fit, acquisition);
criterion_main!(benches);
