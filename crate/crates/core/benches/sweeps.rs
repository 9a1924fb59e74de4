//! Sequential against data-parallel execution on the batch workloads.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use degnet::dynamics::{ActivationScheme, MovePolicy};
use degnet::experiments::{path_sweep, random_seed_sweep};
use degnet::oracle::equilibrium_census;
use degnet::{Execution, GameConfig};

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn census(c: &mut Criterion) {
    let mut group = c.benchmark_group("census_n5");
    group.sample_size(10);
    for cfg in [GameConfig::ncg(), GameConfig::local_aog(2)] {
        for exec in MODES {
            group.bench_with_input(
                BenchmarkId::new(cfg.to_string(), format!("{exec:?}")),
                &exec,
                |b, &exec| b.iter(|| equilibrium_census(5, &cfg, exec).unwrap()),
            );
        }
    }
    group.finish();
}

fn round_robin_sweep(c: &mut Criterion) {
    let cfg = GameConfig::local_aog(2);
    let sizes = [20, 30, 40, 50];
    let mut group = c.benchmark_group("round_robin_paths");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    path_sweep(
                        &sizes,
                        &cfg,
                        |n| Ok(ActivationScheme::round_robin(n, MovePolicy::BestSingleEdge)),
                        100_000,
                        exec,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

fn random_seeds(c: &mut Criterion) {
    let cfg = GameConfig::aog();
    let mut group = c.benchmark_group("random_seeds_p20");
    group.sample_size(10);
    for exec in MODES {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{exec:?}")),
            &exec,
            |b, &exec| {
                b.iter(|| {
                    random_seed_sweep(
                        20,
                        20,
                        &cfg,
                        MovePolicy::FirstImprovingSingleMove,
                        100_000,
                        exec,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, census, round_robin_sweep, random_seeds);
criterion_main!(benches);
