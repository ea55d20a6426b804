use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use thz_link::engine::{simulate, LinkModel};
use thz_link::phase_noise::measure_leakage;
use thz_link::rng::StreamFactory;
use thz_link::{Execution, SystemConfig};

fn modes() -> Vec<(&'static str, Execution)> {
    let mut m = vec![("sequential", Execution::Sequential)];
    if cfg!(feature = "parallel") {
        m.push(("parallel", Execution::Parallel));
    }
    m
}

fn trials(c: &mut Criterion) {
    let config = SystemConfig::default();
    let model = LinkModel::new(&config, Execution::Parallel).unwrap();
    let mut group = c.benchmark_group("simulate_100k");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| simulate(black_box(&model), &[2.0], 100_000, exec).unwrap())
        });
    }
    group.finish();
}

fn leakage(c: &mut Criterion) {
    let grid = SystemConfig::default().grid().unwrap();
    let streams = StreamFactory::new(1);
    let mut group = c.benchmark_group("measure_leakage_2p18x8");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| measure_leakage(black_box(1.5e9), &grid, 1 << 18, 8, &streams, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, trials, leakage);
criterion_main!(benches);
