//! Phase-diagram sweep throughput: thread-pool fan-out vs a single thread.
//!
//! Grid cells are independent, so the parallel sweep should approach linear
//! speedup in the analytic strategy (cheap cells, eigenvalue-bound) and do
//! even better relatively in the basin strategy (expensive cells,
//! integration-bound). Run with and without `--no-default-features` to
//! compare the feature-gated build as well; within one build, the comparison
//! below is sequential helper vs pooled entry point.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use dicke_dimer::model::{CavityParams, DimerParams};
use dicke_dimer::ode::SolverOpts;
use dicke_dimer::phasemap::{
    sweep_grid, sweep_grid_sequential, AxisName, BasinOptions, GridAxis, Strategy,
};

fn base_params() -> DimerParams {
    DimerParams::symmetric(
        CavityParams {
            omega_c: 1.0,
            omega_a: 1.0,
            lambda: 0.5,
            kappa: 0.2,
            chi: 0.0,
        },
        0.1,
    )
    .unwrap()
}

fn axes(n: usize) -> [GridAxis; 2] {
    [
        GridAxis::linspace(AxisName::Lambda, 0.2, 1.0, n).unwrap(),
        GridAxis::linspace(AxisName::Hopping, 0.0, 0.45, n).unwrap(),
    ]
}

fn bench_analytic_sweep(c: &mut Criterion) {
    let base = base_params();
    let strategy = Strategy::analytic();
    let mut group = c.benchmark_group("analytic_sweep");
    for n in [8usize, 16, 24] {
        let grid = axes(n);
        group.bench_with_input(BenchmarkId::new("sequential", n * n), &grid, |b, grid| {
            b.iter(|| sweep_grid_sequential(black_box(&base), grid, &strategy).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("parallel", n * n), &grid, |b, grid| {
            b.iter(|| sweep_grid(black_box(&base), grid, &strategy).unwrap())
        });
    }
    group.finish();
}

fn bench_basin_sweep(c: &mut Criterion) {
    let base = base_params();
    // Loose tolerances and a short horizon keep single iterations affordable;
    // the seq/par ratio is what matters here, not the labels.
    let strategy = Strategy::Basin(BasinOptions {
        t_max: 300.0,
        solver: SolverOpts {
            rtol: 1e-6,
            atol: 1e-9,
            ..SolverOpts::default()
        },
        ..BasinOptions::default()
    });
    let mut group = c.benchmark_group("basin_sweep");
    group.sample_size(10);
    let grid = axes(4);
    group.bench_with_input(BenchmarkId::new("sequential", 16), &grid, |b, grid| {
        b.iter(|| sweep_grid_sequential(black_box(&base), grid, &strategy).unwrap())
    });
    group.bench_with_input(BenchmarkId::new("parallel", 16), &grid, |b, grid| {
        b.iter(|| sweep_grid(black_box(&base), grid, &strategy).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_analytic_sweep, bench_basin_sweep);
criterion_main!(benches);
