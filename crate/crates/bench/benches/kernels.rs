use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use levi_core::catalog;
use levi_core::config::CONE_RESOLUTION;
use levi_core::distance::{boundary_delta_forms, delta_hessian, project_to_boundary, BoundaryPoint};
use levi_core::forms::{cone_min, max_gamma, tangent_frame, ConeSpec};
use levi_core::theorems::{verify_theorem, TheoremKind, VerifyOptions};
use levi_core::{hessian_forms, RealPoint};

fn kernels(c: &mut Criterion) {
    let ell = catalog::complex_ellipsoid(&[2.0, 1.0]);
    let img = catalog::ball_image(0.6);
    let z = RealPoint(vec![0.35, 0.1, -0.4, 0.3]);

    c.bench_function("hessian_forms/ball-image", |b| b.iter(|| hessian_forms(&img.f, black_box(&z)).unwrap()));
    c.bench_function("project/complex-ellipsoid", |b| b.iter(|| project_to_boundary(&ell, black_box(&z)).unwrap()));
    c.bench_function("project/ball-image", |b| b.iter(|| project_to_boundary(&img, black_box(&z)).unwrap()));
    c.bench_function("delta_hessian/ball-image", |b| b.iter(|| delta_hessian(&img, black_box(&z)).unwrap()));

    let m = catalog::model(2.0);
    let p = BoundaryPoint::at(&m, RealPoint(vec![0.0; 4])).unwrap();
    let forms = boundary_delta_forms(&m, &p).unwrap();
    let frame = tangent_frame(&m, &p).unwrap();
    let cone = ConeSpec::new(0.8).unwrap();
    c.bench_function("cone_min/model", |b| {
        b.iter(|| cone_min(black_box(&forms), &frame, &cone, CONE_RESOLUTION).unwrap())
    });
    c.bench_function("max_gamma/model", |b| b.iter(|| max_gamma(&m, black_box(&p), 1e-10).unwrap()));
}

fn verify(c: &mut Criterion) {
    let ball = catalog::ball(2);
    let mut opts = VerifyOptions::new(&ball);
    opts.samples = 50;
    opts.hypothesis_samples = 8;
    let mut g = c.benchmark_group("verify");
    g.sample_size(10);
    g.bench_function("oka/ball/50", |b| b.iter(|| verify_theorem(TheoremKind::Oka, &ball, black_box(&opts)).unwrap()));
    g.finish();
}

criterion_group!(benches, kernels, verify);
criterion_main!(benches);
