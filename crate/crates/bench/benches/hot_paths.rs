//! Benchmarks for the paths that dominate real experiment time: drawing a
//! formula, deciding it, and the spectral pipeline behind the predictions.

use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use satlab::components::decompose;
use satlab::kernel::power_law_kernel;
use satlab::rng::TrialKey;
use satlab::sampler::{sample_digraph, sample_formula};
use satlab::spectra::{period, rho_star};
use satlab::{solve_scc, BlockKernel};

fn bench_sampling(c: &mut Criterion) {
    let kernel = BlockKernel::homogeneous(1.0).unwrap();
    let mut group = c.benchmark_group("sample_formula");
    for n in [500usize, 1000, 2000] {
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| {
            let mut trial = 0u64;
            b.iter(|| {
                trial += 1;
                let s = sample_formula(&kernel, n, 1.0, TrialKey::new(17, trial)).unwrap();
                black_box(s.formula.clause_count())
            });
        });
    }
    group.finish();

    c.bench_function("sample_digraph/1000", |b| {
        let kernel = BlockKernel::homogeneous(1.0).unwrap();
        let mut trial = 0u64;
        b.iter(|| {
            trial += 1;
            let s = sample_digraph(&kernel, 1000, 1.0, TrialKey::new(18, trial)).unwrap();
            black_box(s.digraph.arc_count())
        });
    });
}

fn bench_solving(c: &mut Criterion) {
    // Near-critical formulas make the solver walk an honest component
    // structure rather than bail out of one giant contradiction.
    let kernel = BlockKernel::homogeneous(1.0).unwrap();
    let mut group = c.benchmark_group("solve_scc");
    for n in [1000usize, 4000] {
        let sample = sample_formula(&kernel, n, 1.0, TrialKey::new(23, 0)).unwrap();
        group.bench_with_input(
            BenchmarkId::from_parameter(n),
            &sample.formula,
            |b, formula| b.iter(|| black_box(solve_scc(formula).status)),
        );
    }
    group.finish();
}

fn bench_spectra(c: &mut Criterion) {
    let kernel = power_law_kernel(0.5, 0.5, 0.25, 0.25, 5).unwrap();

    c.bench_function("rho_star/powerlaw_m5", |b| {
        b.iter(|| black_box(rho_star(&kernel).unwrap().rho_star))
    });

    c.bench_function("decompose_and_period/powerlaw_m5", |b| {
        let gamma = kernel.implication_digraphon().unwrap();
        b.iter(|| {
            let d = decompose(&gamma);
            let mut acc = 0usize;
            for comp in &d.components {
                acc += period(&gamma, comp).unwrap().0;
            }
            black_box(acc)
        });
    });
}

criterion_group!(benches, bench_sampling, bench_solving, bench_spectra);
criterion_main!(benches);
