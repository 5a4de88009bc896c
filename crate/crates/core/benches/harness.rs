use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use riskbench_core::advantage_walk::survival_probability;
use riskbench_core::harness::run_all;
use riskbench_core::io::preset;
use riskbench_core::{Execution, RewardDistribution};

fn modes() -> [(&'static str, Execution); 2] {
    [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)]
}

fn experiment(c: &mut Criterion) {
    let mut group = c.benchmark_group("run_all");
    group.sample_size(10);
    for id in ["fig2a", "fig3a"] {
        let cfg = preset(id).unwrap().with_horizon(10_000);
        for (name, exec) in modes() {
            group.bench_with_input(BenchmarkId::new(name, id), &cfg, |b, cfg| {
                b.iter(|| run_all(cfg, exec))
            });
        }
    }
    group.finish();
}

fn survival(c: &mut Criterion) {
    let mut group = c.benchmark_group("survival");
    group.sample_size(10);
    let inc = RewardDistribution::rademacher();
    for (name, exec) in modes() {
        group.bench_function(name, |b| b.iter(|| survival_probability(&inc, 100, 100_000, 1, exec)));
    }
    group.finish();
}

criterion_group!(benches, experiment, survival);
criterion_main!(benches);
