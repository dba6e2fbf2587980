use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use friedrichs::evolution::{diagonalize_with, make_state, ExactPropagator, StateLabel};
use friedrichs::hardy::{project_batch, CayleyGrid, SampledFunction, Side};
use friedrichs::model::{assemble_hamiltonian, DiscreteModel, ModelParams};
use friedrichs::parallel::Execution;
use friedrichs::restriction::restricted_emission;
use friedrichs::spectral::{default_guess, find_pole, LevelShift};
use friedrichs::Complex64;

const MODES: [Execution; 2] = [Execution::Sequential, Execution::Parallel];

fn name(e: Execution) -> &'static str {
    match e {
        Execution::Sequential => "sequential",
        Execution::Parallel => "parallel",
    }
}

fn diagonalization(c: &mut Criterion) {
    let h = assemble_hamiltonian(&DiscreteModel::paper());
    let mut g = c.benchmark_group("diagonalize_1201");
    g.sample_size(20);
    for e in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name(e)), &e, |b, &e| {
            b.iter(|| diagonalize_with(black_box(&h), e).unwrap())
        });
    }
    g.finish();
}

fn survival_sweep(c: &mut Criterion) {
    let dm = DiscreteModel::paper();
    let h = assemble_hamiltonian(&dm);
    let sd = diagonalize_with(&h, Execution::Parallel).unwrap();
    let psi0 = make_state(StateLabel::Discrete, &dm).unwrap();
    let prop = ExactPropagator::new(&sd, &psi0).unwrap();
    let times: Vec<f64> = (0..600).map(|k| -30.0 + 0.1 * k as f64).collect();
    let mut g = c.benchmark_group("survival_600_times");
    for e in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name(e)), &e, |b, &e| {
            b.iter(|| e.map(&times, |&t| prop.component_at(0, t)))
        });
    }
    g.finish();
}

fn emission_sweep(c: &mut Criterion) {
    let ls = LevelShift::new(ModelParams::paper());
    let pole = find_pole(&ls, default_guess(&ls)).unwrap();
    let xs: Vec<f64> = (0..200).map(|k| -20.0 + 0.2 * k as f64).collect();
    let mut g = c.benchmark_group("restricted_emission_200_x");
    g.sample_size(10);
    for e in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name(e)), &e, |b, &e| {
            b.iter(|| e.try_map(&xs, |&x| restricted_emission(&ls, &pole, 10.0, x)).unwrap())
        });
    }
    g.finish();
}

fn hardy_batch(c: &mut Criterion) {
    let grid = CayleyGrid::new(4096, 2.0).unwrap();
    let fs: Vec<SampledFunction> = (0..32)
        .map(|k| {
            let p = Complex64::new(0.1 * k as f64, 0.5 + 0.05 * k as f64);
            SampledFunction::from_fn(grid, format!("f{k}"), |w| 1.0 / (w - p) + 1.0 / (w - p.conj()).powi(2)).unwrap()
        })
        .collect();
    let mut g = c.benchmark_group("project_32x4096");
    for e in MODES {
        g.bench_with_input(BenchmarkId::from_parameter(name(e)), &e, |b, &e| {
            b.iter(|| project_batch(&fs, Side::Plus, e).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, diagonalization, survival_sweep, emission_sweep, hardy_batch);
criterion_main!(benches);
