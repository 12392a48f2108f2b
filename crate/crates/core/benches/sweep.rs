use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use flrw_bgk::dynamics::{SolverConfig, Stepper};
use flrw_bgk::initial::{matched_to_global, Profile};
use flrw_bgk::sweep::{
    beta_table, beta_table_sequential, build_equilibria, build_equilibria_sequential, simulate_all,
    simulate_all_sequential, SweepJob,
};
use flrw_bgk::{MomentPair, RadialGrid, RuleKind, SeriesTolerance, Statistics};

fn jobs(count: usize, stats: Statistics) -> Vec<SweepJob> {
    let grid = Arc::new(RadialGrid::new(RuleKind::Exponential, 64, None).unwrap());
    (0..count)
        .map(|i| {
            let profile = Profile::GammaShell {
                amplitude: 1.0,
                power: 1.0 + (i % 4) as f64,
                rate: 1.0 + 0.1 * i as f64,
            };
            SweepJob {
                initial: matched_to_global(&profile, &grid, stats).unwrap(),
                config: SolverConfig {
                    dt: 0.01,
                    t_end: 2.0,
                    stepper: Stepper::ExactExponential,
                    statistics: stats,
                    ..SolverConfig::default()
                },
            }
        })
        .collect()
}

fn bench_simulate(c: &mut Criterion) {
    let mut group = c.benchmark_group("simulate_all");
    group.sample_size(10);
    for stats in [Statistics::MaxwellBoltzmann, Statistics::BoseEinstein] {
        let batch = jobs(16, stats);
        group.bench_with_input(BenchmarkId::new("parallel", stats), &batch, |b, batch| {
            b.iter(|| simulate_all(black_box(batch)))
        });
        group.bench_with_input(BenchmarkId::new("sequential", stats), &batch, |b, batch| {
            b.iter(|| simulate_all_sequential(black_box(batch)))
        });
    }
    group.finish();
}

fn bench_beta(c: &mut Criterion) {
    let tol = SeriesTolerance::default();
    let cs: Vec<f64> = (1..=4096).map(|i| 1e-3 * i as f64).collect();
    let mut group = c.benchmark_group("beta_table");
    group.bench_function("parallel", |b| b.iter(|| beta_table(black_box(&cs), &tol)));
    group.bench_function("sequential", |b| {
        b.iter(|| beta_table_sequential(black_box(&cs), &tol))
    });
    group.finish();
}

fn bench_equilibria(c: &mut Criterion) {
    let tol = SeriesTolerance::default();
    let moments: Vec<MomentPair> = (1..=1024)
        .map(|i| {
            let rho = 1.0 + 0.01 * i as f64;
            MomentPair::new(rho, 3.0 * rho * (1.0 + 0.001 * i as f64))
        })
        .collect();
    let mut group = c.benchmark_group("build_equilibria_be");
    group.bench_function("parallel", |b| {
        b.iter(|| build_equilibria(black_box(&moments), Statistics::BoseEinstein, &tol))
    });
    group.bench_function("sequential", |b| {
        b.iter(|| build_equilibria_sequential(black_box(&moments), Statistics::BoseEinstein, &tol))
    });
    group.finish();
}

criterion_group!(benches, bench_simulate, bench_beta, bench_equilibria);
criterion_main!(benches);
