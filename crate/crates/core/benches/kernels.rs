use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use nsflab::acontraction::CoupledSystem;
use nsflab::lab::{self, ScenarioConfig};
use nsflab::nsf_solver::{make_initial_data, nsf_rhs, SolverConfig};
use nsflab::par::Exec;

const POLICIES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn kernels(c: &mut Criterion) {
    let cfg = ScenarioConfig::reference();
    let wave = lab::build_wave(&cfg).unwrap();
    let pert = cfg.perturbation.realize(cfg.seed);
    let field = make_initial_data(&wave, &cfg.grid, &pert, Exec::Sequential).unwrap();
    let xs = cfg.grid.nodes();

    let mut g = c.benchmark_group("nsf_rhs");
    for (name, exec) in POLICIES {
        let sys = CoupledSystem::new(&wave, cfg.solver).unwrap();
        let bc = *sys.far_field();
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| nsf_rhs(black_box(&field), &cfg.gas, &bc, exec))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("composite_sampling");
    for (name, exec) in POLICIES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| wave.sample_nodes(0.1, -0.1, black_box(5.0), &xs, exec))
        });
    }
    g.finish();

    let mut g = c.benchmark_group("coupled_step");
    g.sample_size(20);
    for (name, exec) in POLICIES {
        let solver = SolverConfig { exec, ..cfg.solver };
        let sys = CoupledSystem::new(&wave, solver).unwrap();
        let start = sys.start(field.clone());
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter_batched(
                || start.clone(),
                |mut st| sys.step(&mut st).unwrap(),
                criterion::BatchSize::LargeInput,
            )
        });
    }
    g.finish();
}

criterion_group!(benches, kernels);
criterion_main!(benches);
