//! Criterion benchmarks for the hot paths: Γ evaluation, winding counts,
//! full resonance sweeps, Lambert branches, and the kernel expansion.

use criterion::{black_box, criterion_group, criterion_main, Criterion};
use halfspace_resonances::lambertw::lambert_w;
use halfspace_resonances::model::{gamma, BoundaryCondition::Dirichlet, ModelParams, Point};
use halfspace_resonances::oracle::{half_disk_count, winding_count, Rectangle};
use halfspace_resonances::semiclassical::{resonance_wk, SemiclassicalParams, Sign};
use halfspace_resonances::solver::{find_all, find_branch};
use halfspace_resonances::{expansion, oracle};
use num_complex::Complex64;
use std::f64::consts::PI;

fn params() -> ModelParams {
    ModelParams::on_axis(Dirichlet, 0.0, 1.0).unwrap()
}

fn bench_gamma(c: &mut Criterion) {
    let p = params();
    let z = Complex64::new(17.3, -1.2);
    c.bench_function("gamma_eval", |b| b.iter(|| gamma(&p, black_box(z))));
}

fn bench_branch(c: &mut Criterion) {
    let p = params();
    c.bench_function("find_branch_k25", |b| b.iter(|| find_branch(&p, black_box(25)).unwrap()));
}

fn bench_find_all(c: &mut Criterion) {
    let p = params();
    c.bench_function("find_all_r30", |b| b.iter(|| find_all(&p, black_box(30.0)).unwrap()));
}

fn bench_winding(c: &mut Criterion) {
    let p = params();
    let rect = Rectangle::new(PI, 1.5 * PI, -3.0, -1e-6).unwrap();
    c.bench_function("winding_branch_box", |b| {
        b.iter(|| winding_count(&p, black_box(&rect)).unwrap())
    });
    c.bench_function("half_disk_r30", |b| {
        b.iter(|| half_disk_count(&p, black_box(30.0)).unwrap())
    });
}

fn bench_lambert(c: &mut Criterion) {
    let w = Complex64::new(-2.7e6, 0.0);
    c.bench_function("lambert_w_k50", |b| b.iter(|| lambert_w(50, black_box(w)).unwrap()));
    let sp = SemiclassicalParams::new(1e-3, 0.5, Sign::Plus, Dirichlet, 1.0).unwrap();
    c.bench_function("resonance_wk_k500", |b| {
        b.iter(|| resonance_wk(&sp, black_box(500)).unwrap())
    });
}

fn bench_expansion(c: &mut Criterion) {
    let p = params();
    let x = Point::new(0.0, 0.0, 1.5);
    let xp = Point::new(0.0, 0.0, 2.0);
    c.bench_function("schrodinger_kernel_nmax20", |b| {
        b.iter(|| expansion::schrodinger_kernel(&p, 2.0, &x, &xp, black_box(20)).unwrap())
    });
    c.bench_function("schrodinger_direct_oracle", |b| {
        b.iter(|| oracle::schrodinger_direct(&p, 2.0, &x, &xp).unwrap())
    });
}

criterion_group!(
    benches,
    bench_gamma,
    bench_branch,
    bench_find_all,
    bench_winding,
    bench_lambert,
    bench_expansion
);
criterion_main!(benches);
