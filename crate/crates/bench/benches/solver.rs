use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use critnls_bench::gaussian_field;
use critnls_core::diagnostics::{energy, grad_norm_sq};
use critnls_core::groundstate::DEFAULT_QUAD_TOL;
use critnls_core::solver::{Nonlinearity, Stepper};
use critnls_core::variational::delta_bar;
use critnls_core::{Dimension, GroundStateProfile};

fn strang(c: &mut Criterion) {
    let mut group = c.benchmark_group("strang_step");
    for n_points in [1024, 4096, 16384] {
        let mut f = gaussian_field(Dimension::THREE, n_points);
        let mut stepper = Stepper::new(f.grid(), Nonlinearity::Focusing);
        group.bench_with_input(BenchmarkId::from_parameter(n_points), &n_points, |b, _| {
            b.iter(|| stepper.strang_step(black_box(&mut f), 1e-3).unwrap())
        });
    }
    group.finish();
}

fn diagnostics(c: &mut Criterion) {
    let f = gaussian_field(Dimension::THREE, 4096);
    c.bench_function("energy_4096", |b| b.iter(|| energy(black_box(&f))));
    c.bench_function("grad_norm_sq_4096", |b| b.iter(|| grad_norm_sq(black_box(&f))));
}

fn ground_state(c: &mut Criterion) {
    for n in [3, 5] {
        let dim = Dimension::new(n).unwrap();
        c.bench_function(&format!("ground_state_n{n}"), |b| {
            b.iter(|| GroundStateProfile::compute(black_box(dim), DEFAULT_QUAD_TOL).unwrap())
        });
    }
    let p = GroundStateProfile::cached(Dimension::THREE);
    c.bench_function("delta_bar_n3", |b| b.iter(|| delta_bar(black_box(0.1), p).unwrap()));
}

criterion_group!(benches, strang, diagnostics, ground_state);
criterion_main!(benches);
