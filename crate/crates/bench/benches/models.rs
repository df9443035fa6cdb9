use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use syz_bench::tower;
use syz_core::bside::{normal_form, verify_blowup_presentation};
use syz_core::skeleton::{glued_skeleton, homology, mayer_vietoris, SkeletonSpec};
use syz_core::syz::{find_critical_manifolds, potential_tilde, project_to_manifold, SolverConfig};
use syz_core::tropical::{amoeba_contains_oracle, tailored_amoeba_contains_closed, TailoringParams};
use syz_core::{AmbientPoint, BasePoint, Complex64, ModelShape};

fn tropical(c: &mut Criterion) {
    let params = TailoringParams::default();
    let xi = BasePoint::new(vec![-0.4, -0.2]).unwrap();
    c.bench_function("tailored_amoeba_closed_q2", |b| {
        b.iter(|| tailored_amoeba_contains_closed(black_box(&xi), &params, 0.0).unwrap())
    });
    c.bench_function("amoeba_oracle_q2_grid64", |b| {
        b.iter(|| amoeba_contains_oracle(black_box(&xi), 64, 1e-6).unwrap())
    });
}

fn syz(c: &mut Criterion) {
    let shape = ModelShape::new(1, 2);
    let z = vec![Complex64::new(0.3, 0.1), Complex64::new(-0.2, 0.4)];
    let u = vec![Complex64::new(-0.5, 0.1), Complex64::new(0.01, 0.0)];
    let pt = project_to_manifold(&AmbientPoint::new(z, u, &shape).unwrap(), &shape).unwrap();
    c.bench_function("potential_tilde_x12", |b| b.iter(|| potential_tilde(black_box(&pt), &shape).unwrap()));
    let small = ModelShape::new(1, 1);
    let mut cfg = SolverConfig::for_shape(&small, 1);
    cfg.n_starts = 8;
    cfg.threads = Some(1);
    let mut g = c.benchmark_group("solver");
    g.sample_size(10);
    g.bench_function("critical_x11_8_starts", |b| b.iter(|| find_critical_manifolds(&small, &cfg).unwrap()));
    g.finish();
}

fn skeleton(c: &mut Criterion) {
    let mut g = c.benchmark_group("skeleton");
    g.sample_size(10);
    g.bench_function("glued_homology_2_3", |b| {
        b.iter(|| homology(&glued_skeleton(&SkeletonSpec::new(2, 3).unwrap()).unwrap().complex))
    });
    let glued = glued_skeleton(&SkeletonSpec::new(2, 3).unwrap()).unwrap();
    g.bench_function("mayer_vietoris_2_3", |b| b.iter(|| mayer_vietoris(black_box(&glued)).unwrap()));
    g.finish();
}

fn bside(c: &mut Criterion) {
    let p = tower(3, 3, 4);
    c.bench_function("normal_form_tower_3_3_4", |b| b.iter(|| normal_form(black_box(&p), 3, 3)));
    let mut g = c.benchmark_group("bside");
    g.sample_size(10);
    g.bench_function("blowup_presentation_3_3", |b| b.iter(|| verify_blowup_presentation(3, 3, 1).unwrap()));
    g.finish();
}

criterion_group!(benches, tropical, syz, skeleton, bside);
criterion_main!(benches);
