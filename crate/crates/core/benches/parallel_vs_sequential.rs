//! Throughput comparison of the data-parallel fan-outs against their
//! sequential fallbacks: Monte Carlo replication batches and the
//! alliance-size cost sweep, plus the lattice first-passage solve that
//! gates the analytic path.
//!
//! With `--no-default-features` (rayon disabled) only the sequential
//! variants run.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use alliance_core::decision::{AllianceConfig, PoissonSurrogate};
use alliance_core::game::{optimize_eta, CostModel, SweepSpec};
use alliance_core::scenario::Scenario;
use alliance_core::sim::{estimate, Quantity, SimConfig};
use alliance_core::stochastic::{
    first_passage, ArrivalModel, CountLaw, GeometricLaw, NetworkParams, ObservationModel,
};

fn mid_scenario() -> Scenario {
    Scenario::new(
        ArrivalModel::new(5.0, 4.0).unwrap(),
        ObservationModel::new(1.0, 1.0).unwrap(),
        NetworkParams::new(1_000).unwrap(),
        AllianceConfig::new(100, 0.7).unwrap(),
    )
    .unwrap()
}

fn bench_monte_carlo(c: &mut Criterion) {
    let scenario = mid_scenario();
    let mut group = c.benchmark_group("monte_carlo_20k_replications");
    group.sample_size(10);
    let parallelism_levels: &[usize] = if cfg!(feature = "parallel") {
        &[1, 8]
    } else {
        &[1]
    };
    for &workers in parallelism_levels {
        group.bench_with_input(
            BenchmarkId::new("estimate_nu", workers),
            &workers,
            |b, &workers| {
                let config = SimConfig::new(7, 20_000).unwrap().with_parallelism(workers);
                b.iter(|| estimate(Quantity::NuMean, &config, &scenario).unwrap());
            },
        );
    }
    group.finish();
}

fn bench_cost_sweep(c: &mut Criterion) {
    let network = NetworkParams::new(60_000).unwrap();
    let surrogate = PoissonSurrogate::new(
        &ArrivalModel::new(50.0, 0.0).unwrap(),
        &ObservationModel::new(3.0, 1.0).unwrap(),
        &network,
        598.0,
    );
    let cost = CostModel::new(1_000_000.0, 0.001).unwrap();
    let sweep = SweepSpec::new(0, 29_000, 100).unwrap();
    let mut group = c.benchmark_group("cost_sweep_291_points");
    group.sample_size(10);
    let label = if cfg!(feature = "parallel") {
        "parallel"
    } else {
        "sequential"
    };
    group.bench_function(label, |b| {
        b.iter(|| optimize_eta(&cost, &surrogate, 0.7, 0.39, &network, &sweep).unwrap())
    });
    group.finish();
}

fn bench_first_passage(c: &mut Criterion) {
    let inc = GeometricLaw::from_mean(50.0).unwrap();
    let init = CountLaw::Geometric(GeometricLaw::from_mean(150.0).unwrap());
    c.bench_function("first_passage_threshold_30k", |b| {
        b.iter(|| first_passage(&init, inc, 30_000, 1e-12).unwrap())
    });
}

criterion_group!(
    benches,
    bench_monte_carlo,
    bench_cost_sweep,
    bench_first_passage
);
criterion_main!(benches);
