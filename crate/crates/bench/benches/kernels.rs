use criterion::{black_box, criterion_group, criterion_main, Criterion};

use bulksurf_core::disk::{solve_robin_poisson, DiskGrid};
use bulksurf_core::fem::{lambda_fem, make_disk_mesh};
use bulksurf_core::hessian::{ball_coefficients, hessian_row_with};
use bulksurf_core::radial::solve_principal_ball;
use bulksurf_core::rng::SplitMix64;
use bulksurf_core::symmetrize::{
    cap_symmetrize_disk, compare_concentration, CircleField, PolarField,
};

fn bench_radial_shooting(c: &mut Criterion) {
    c.bench_function("radial_solve_principal_ball_4096", |b| {
        b.iter(|| solve_principal_ball(2, 1.0, black_box(-3.0), black_box(0.5), 4096).unwrap())
    });
}

fn bench_hessian_rows(c: &mut Criterion) {
    let eig = solve_principal_ball(2, 1.0, -40.0, 0.0, 4096).unwrap();
    let coeffs = ball_coefficients(&eig).unwrap();
    c.bench_function("hessian_row_k20_grid4096", |b| {
        b.iter(|| hessian_row_with(black_box(20), &eig, &coeffs, 4096).unwrap())
    });
}

fn bench_disk_poisson(c: &mut Criterion) {
    let grid = DiskGrid::new(96, 128).unwrap();
    let f = grid.field(|r, t| 1.0 + 0.5 * (3.0 * t).cos() * r);
    let w = grid.circle(|t| 0.2 + 0.1 * t.sin());
    c.bench_function("robin_poisson_modal_96x128", |b| {
        b.iter(|| solve_robin_poisson(black_box(&f), black_box(&w), 1.0).unwrap())
    });
}

fn bench_symmetrization(c: &mut Criterion) {
    let mut rng = SplitMix64::new(5);
    let rings: Vec<(f64, CircleField)> = (0..96)
        .map(|i| {
            let r = (i as f64 + 0.5) / 96.0;
            let vals: Vec<f64> = (0..128).map(|_| rng.next_f64()).collect();
            (r, CircleField::new(r, vals).unwrap())
        })
        .collect();
    let f = PolarField::new(rings).unwrap();
    let s = cap_symmetrize_disk(&f).unwrap();
    c.bench_function("cap_symmetrize_disk_96x128", |b| {
        b.iter(|| cap_symmetrize_disk(black_box(&f)).unwrap())
    });
    c.bench_function("compare_concentration_96x128", |b| {
        b.iter(|| compare_concentration(black_box(&f), black_box(&s), 1e-9).unwrap())
    });
}

fn bench_fem_eigen(c: &mut Criterion) {
    let mesh = make_disk_mesh(0.05).unwrap();
    c.bench_function("fem_disk_eigen_h0.05", |b| {
        b.iter(|| lambda_fem(black_box(&mesh), 1.0, 0.0).unwrap())
    });
}

criterion_group!(
    benches,
    bench_radial_shooting,
    bench_hessian_rows,
    bench_disk_poisson,
    bench_symmetrization,
    bench_fem_eigen
);
criterion_main!(benches);
