use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};
use mixhardy::bounds::{certify_lower_bound, default_alpha_grid, default_t_grid, trial_power};
use mixhardy::fullspace::{mc_quotient, BumpSpec};
use mixhardy::rayleigh::{
    build_mesh, eval_gradient, minimize_general, minimize_p2, refine_and_extrapolate, DiscreteProfile, GeneralOptions,
    MeshSpec,
};
use mixhardy::shooting::oscillation_test;
use mixhardy::solver::BStarOptions;
use mixhardy::{compute_bstar, ProblemParams, RefineOptions};

fn quotient(c: &mut Criterion) {
    let mesh = Arc::new(build_mesh(MeshSpec::default()).unwrap());
    let phi = DiscreteProfile::from_fn(mesh, |t| 1.0 + t.sin());
    let params = ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0);
    c.bench_function("gradient/256 cells, p=3", |b| b.iter(|| eval_gradient(black_box(&params), &phi).unwrap()));
}

fn solvers(c: &mut Criterion) {
    let mesh = Arc::new(build_mesh(MeshSpec::default()).unwrap());
    let p2 = ProblemParams::bottom(3, 2, 2.0, 1.0, 1.0);
    let p3 = ProblemParams::bottom(4, 2, 3.0, 2.0, 1.0);
    c.bench_function("minimize_p2/256 cells", |b| b.iter(|| minimize_p2(black_box(&p2), mesh.clone()).unwrap()));
    c.bench_function("minimize_general/256 cells, p=3", |b| {
        b.iter(|| minimize_general(black_box(&p3), mesh.clone(), &GeneralOptions::default()).unwrap())
    });
    let mut slow = c.benchmark_group("refine");
    slow.sample_size(10);
    slow.bench_function("4 levels, p=2", |b| {
        b.iter(|| refine_and_extrapolate(black_box(&p2), &RefineOptions::with_levels(4)).unwrap())
    });
    slow.bench_function("4 levels, p=3", |b| {
        b.iter(|| refine_and_extrapolate(black_box(&p3), &RefineOptions::with_levels(4)).unwrap())
    });
    slow.finish();
}

fn thresholds(c: &mut Criterion) {
    let params = ProblemParams::bottom(3, 2, 2.0, 1.0, 0.5);
    c.bench_function("oscillation_test", |b| b.iter(|| oscillation_test(black_box(&params), 0.25).unwrap()));
    let mut slow = c.benchmark_group("certificates");
    slow.sample_size(10);
    slow.bench_function("compute_bstar", |b| {
        b.iter(|| compute_bstar(black_box(&params.bottom_at(0.0)), &BStarOptions::default()).unwrap())
    });
    let (alphas, ts) = (default_alpha_grid(), default_t_grid());
    let cert = ProblemParams::bottom(4, 2, 2.0, 1.0, 0.025);
    slow.bench_function("certify_lower_bound", |b| b.iter(|| certify_lower_bound(black_box(&cert), &alphas, &ts)));
    slow.finish();
    c.bench_function("trial_power", |b| b.iter(|| trial_power(black_box(&params), 0.1).unwrap()));
}

fn monte_carlo(c: &mut Criterion) {
    let params = ProblemParams::new(4, 2, 2.0, 2.0, 1.0, 0.0);
    let bump = BumpSpec::standard(4);
    let mut g = c.benchmark_group("monte_carlo");
    g.sample_size(10);
    g.bench_function("mc_quotient/1e5 samples", |b| b.iter(|| mc_quotient(black_box(&params), &bump, 8.0, 100_000, 1)));
    g.finish();
}

criterion_group!(benches, quotient, solvers, thresholds, monte_carlo);
criterion_main!(benches);
