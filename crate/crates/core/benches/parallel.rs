use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use riskcent::centrality::{default_grid, sweep_with};
use riskcent::experiments::{spearman_table, ExperimentConfig};
use riskcent::graph::generate_er;
use riskcent::interlacement::scan_all_pairs;
use riskcent::spectral::{EngineConfig, PathChoice};
use riskcent::{Execution, ExpmEngine, Measure};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn zeta_sweep(c: &mut Criterion) {
    let mut group = c.benchmark_group("zeta_sweep");
    group.sample_size(10);
    let dense = generate_er(300, 0.05, 1, true).unwrap();
    let sparse = generate_er(800, 0.01, 2, false).unwrap();
    let dense_engine = ExpmEngine::new(&dense).unwrap();
    let krylov_engine = ExpmEngine::with_config(
        &sparse,
        EngineConfig {
            path: PathChoice::Krylov,
            ..EngineConfig::default()
        },
    )
    .unwrap();
    let grid = default_grid();
    let short: Vec<f64> = grid.iter().step_by(20).copied().collect();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new("dense_n300", name), &mode, |b, &m| {
            b.iter(|| sweep_with(&dense_engine, &grid, m).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("krylov_n800", name), &mode, |b, &m| {
            b.iter(|| sweep_with(&krylov_engine, &short, m).unwrap())
        });
    }
    group.finish();
}

fn replications(c: &mut Criterion) {
    let mut group = c.benchmark_group("er_replications");
    group.sample_size(10);
    let cfg = ExperimentConfig {
        n: 100,
        densities: vec![0.1],
        zetas: vec![0.1, 0.5, 1.0],
        replications: 64,
        seed: 1,
    };
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new("spearman_table", name), &mode, |b, &m| {
            b.iter(|| spearman_table(&cfg, m).unwrap())
        });
    }
    group.finish();
}

fn all_pairs(c: &mut Criterion) {
    let mut group = c.benchmark_group("interlacement_all_pairs");
    group.sample_size(10);
    let g = generate_er(40, 0.15, 3, true).unwrap();
    let grid = default_grid();
    for (name, mode) in MODES {
        group.bench_with_input(BenchmarkId::new("n40", name), &mode, |b, &m| {
            b.iter(|| scan_all_pairs(&g, Measure::C, &grid, m).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, zeta_sweep, replications, all_pairs);
criterion_main!(benches);
