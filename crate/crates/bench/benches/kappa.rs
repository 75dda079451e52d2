use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use kappa_bench::{chain_case, operator_case, points, polygons};
use kappa_core::{
    kappa_form, metric_d, monotone_project_sup, rho, rho_L_sampled, solve_set_ode, ClosedSet, SolverConfig, VectorField,
};

fn kappa_norms(c: &mut Criterion) {
    let sets = polygons(1, 16);
    let xs = points(2, 2, 16);
    c.bench_function("rho/polygon", |b| {
        b.iter(|| {
            for (x, s) in xs.iter().zip(&sets) {
                black_box(rho(x, s).unwrap());
            }
        })
    });
    c.bench_function("metric_d/polygon_pair", |b| {
        b.iter(|| black_box(metric_d(&sets[0], &sets[1]).unwrap()))
    });
    c.bench_function("kappa_form/polygon_pair", |b| {
        b.iter(|| black_box(kappa_form(&xs[0], &sets[0], &xs[1], &sets[1]).unwrap()))
    });
}

fn operators(c: &mut Criterion) {
    let (a, s, p) = operator_case(3);
    c.bench_function("rho_L/finite_set", |b| {
        b.iter(|| black_box(rho_L_sampled(&a, &s, &p).unwrap()))
    });
}

fn flows(c: &mut Criterion) {
    let f = VectorField::affine(vec![vec![1.0, 0.0], vec![0.0, 2.0]], None);
    let a0 = ClosedSet::boxed(&[-1.0, -1.0], &[1.0, 1.0]);
    let cfg = SolverConfig {
        h: 1e-2,
        ..SolverConfig::default()
    };
    let mut group = c.benchmark_group("set_ode");
    group.sample_size(10);
    group.bench_function("diag_box_t0.5", |b| {
        b.iter(|| black_box(solve_set_ode(&f, &a0, 0.5, &cfg).unwrap()))
    });
    group.finish();
}

fn orders(c: &mut Criterion) {
    let (g, lambda) = chain_case(200);
    c.bench_function("monotone_project_sup/200", |b| {
        b.iter(|| black_box(monotone_project_sup(&g, &lambda).unwrap()))
    });
}

criterion_group!(benches, kappa_norms, operators, flows, orders);
criterion_main!(benches);
