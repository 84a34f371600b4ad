use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use nds_core::upo::{delay_cycle_grid, run_ensemble, sweep_parameter, ProtocolConfig, SweepParameter};
use nds_core::{Execution, NdsParams};

fn ensemble(c: &mut Criterion) {
    let params = NdsParams::default();
    let grid = delay_cycle_grid(0.15, 100).unwrap();
    let protocol = ProtocolConfig::default();
    let mut group = c.benchmark_group("ensemble_setup07_64_runs");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| run_ensemble("setup07", &params, &grid, 64, 1, &protocol, exec).unwrap())
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let params = NdsParams::default();
    let protocol = ProtocolConfig::default();
    let values = [0.7, 0.75, 0.8, 0.85, 0.9, 0.95];
    let mut group = c.benchmark_group("sweep_d_5_probes");
    group.sample_size(10);
    for exec in [Execution::Sequential, Execution::Parallel] {
        group.bench_with_input(BenchmarkId::from_parameter(format!("{exec:?}")), &exec, |b, &exec| {
            b.iter(|| sweep_parameter(&params, SweepParameter::D, &values, 5, 1, &protocol, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, ensemble, sweep);
criterion_main!(benches);
