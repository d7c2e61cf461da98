use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use wfl_core::{
    integrate, perceived_extrema, solve_limit, uniform_grid, BristleModel, IntegratorConfig,
    KFunction, LimitSystem, LoadingProgram, SurfaceProfile, WigglySystem,
};

fn ramp() -> LimitSystem {
    LimitSystem::spring(
        1.0,
        0.0,
        LoadingProgram::Ramp {
            offset: 0.0,
            rate: 1.0,
        },
        2.0,
        0.1,
        -0.1,
    )
    .unwrap()
}

fn limit(c: &mut Criterion) {
    let sys = ramp();
    let mut g = c.benchmark_group("solve_limit");
    for n in [1024usize, 4096, 16384] {
        let grid = uniform_grid(2.0, n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &grid, |b, grid| {
            b.iter(|| solve_limit(&sys, 0.0, black_box(grid)).unwrap())
        });
    }
    g.finish();
}

fn viscous(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate");
    g.sample_size(10);
    for eps in [0.1, 0.02, 0.005] {
        let sys = WigglySystem::new(
            ramp(),
            BristleModel::vertical(1.0, 2.0, 1.0).unwrap(),
            SurfaceProfile::sinusoid_with_slope(0.1).unwrap(),
            eps,
            1.0,
        )
        .unwrap();
        let cfg = IntegratorConfig::default();
        g.bench_with_input(BenchmarkId::from_parameter(eps), &sys, |b, sys| {
            b.iter(|| integrate(sys, 0.0, 2.0, &cfg).unwrap())
        });
    }
    g.finish();
}

fn dissipation_factor(c: &mut Criterion) {
    let k = KFunction::sinusoid(0.1).unwrap();
    c.bench_function("K(0.03)", |b| b.iter(|| k.eval(black_box(0.03))));
}

fn coefficients(c: &mut Criterion) {
    let profile = SurfaceProfile::sinusoid_with_slope(0.1).unwrap();
    let model = BristleModel::slanted(1.0, 20.0, 1.0, 0.7).unwrap();
    c.bench_function("closed form", |b| {
        b.iter(|| black_box(&model).coefficients(&profile).unwrap())
    });
    c.bench_function("inversion oracle", |b| {
        b.iter(|| perceived_extrema(&profile, black_box(model.slope_factor())).unwrap())
    });
}

criterion_group!(benches, limit, viscous, dissipation_factor, coefficients);
criterion_main!(benches);
