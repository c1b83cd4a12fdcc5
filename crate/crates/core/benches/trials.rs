use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use wvc_core::evo::Algorithm;
use wvc_core::experiment::{run_experiment, ExperimentConfig};
use wvc_core::graph::{gen_instance, InstanceKind};
use wvc_core::lp::solve_lp;

fn experiment_scheduling(c: &mut Criterion) {
    let g = gen_instance(InstanceKind::Gnp { n: 12, p: 0.4 }, 8, 5).unwrap();
    let mut group = c.benchmark_group("experiment");
    group.sample_size(10);
    for algo in [Algorithm::Gsemo, Algorithm::Demo] {
        for parallel in [true, false] {
            let mut config = ExperimentConfig::new(algo);
            config.trials = 32;
            config.budget = Some(200_000);
            config.target_ratio = Some(2.0);
            config.parallel = parallel;
            let label = if parallel { "parallel" } else { "sequential" };
            group.bench_with_input(BenchmarkId::new(algo.name(), label), &config, |b, config| {
                b.iter(|| run_experiment(black_box(config), &g, None).unwrap())
            });
        }
    }
    group.finish();
}

fn lp_solve(c: &mut Criterion) {
    let mut group = c.benchmark_group("lp");
    for n in [50usize, 200] {
        let g = gen_instance(InstanceKind::Gnp { n, p: 0.1 }, 100, 1).unwrap();
        let rg = g.full_residual();
        group.bench_with_input(BenchmarkId::from_parameter(n), &rg, |b, rg| b.iter(|| solve_lp(black_box(rg))));
    }
    group.finish();
}

criterion_group!(benches, experiment_scheduling, lp_solve);
criterion_main!(benches);
