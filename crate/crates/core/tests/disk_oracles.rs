//! Polar solvers against a dense monolithic oracle, and the rigidity
//! contrapositive margins.

mod common;

use bulksurf_core::disk::{
    solve_coupled_poisson, solve_dirichlet_poisson, solve_robin_poisson, talenti_verify, DiskGrid,
    TalentiProblem,
};
use bulksurf_core::rng::SplitMix64;
use bulksurf_core::symmetrize::{cap_symmetrize_disk, CircleField, PolarField};
use common::dense_solve;

/// Dense assembly of the five-point polar stencil with the half-cell
/// boundary closure, solved by Gaussian elimination. Mirrors the scheme
/// definition, not the solver: no DFT, no band structure.
#[derive(Clone, Copy)]
enum Bc {
    Robin(f64),
    Dirichlet,
}

fn dense_polar_solve(
    grid: DiskGrid,
    f: &PolarField,
    w: &CircleField,
    bc: Bc,
    potential: Option<&PolarField>,
) -> Vec<f64> {
    let (n, m) = (grid.n_r, grid.m);
    let dr = grid.dr();
    let dth = grid.dtheta();
    let idx = |i: usize, j: usize| i * m + j;
    let mut a = vec![vec![0.0; n * m]; n * m];
    let mut b = vec![0.0; n * m];
    let (mw, dw) = match bc {
        Bc::Robin(beta) => {
            let den = 1.0 + beta * dr / 2.0;
            (beta / den, 1.0 / den)
        }
        Bc::Dirichlet => (2.0 / dr, 2.0 / dr),
    };
    for i in 0..n {
        let r = grid.radius(i);
        for j in 0..m {
            let me = idx(i, j);
            // radial fluxes: face radii i·dr and (i+1)·dr, divided by cell
            // measure r dr
            if i > 0 {
                let c = (i as f64 * dr) / dr / (r * dr);
                a[me][me] += c;
                a[me][idx(i - 1, j)] -= c;
            }
            if i + 1 < n {
                let c = ((i + 1) as f64 * dr) / dr / (r * dr);
                a[me][me] += c;
                a[me][idx(i + 1, j)] -= c;
            } else {
                a[me][me] += mw / (r * dr);
                b[me] += dw * w.values[j] / (r * dr);
            }
            // angular second difference
            let c = 1.0 / (r * r * dth * dth);
            a[me][me] += 2.0 * c;
            a[me][idx(i, (j + 1) % m)] -= c;
            a[me][idx(i, (j + m - 1) % m)] -= c;
            if let Some(q) = potential {
                a[me][me] -= q.rings[i].1.values[j];
            }
            b[me] += f.rings[i].1.values[j];
        }
    }
    dense_solve(&a, &b)
}

fn max_dev(u: &PolarField, dense: &[f64]) -> f64 {
    let m = u.m();
    let mut worst: f64 = 0.0;
    for (i, (_, c)) in u.rings.iter().enumerate() {
        for (j, &v) in c.values.iter().enumerate() {
            worst = worst.max((v - dense[i * m + j]).abs());
        }
    }
    worst
}

#[test]
fn robin_solver_matches_dense_oracle() {
    let grid = DiskGrid::new(32, 32).unwrap();
    let mut rng = SplitMix64::new(211);
    for _ in 0..3 {
        let (a1, a2, ph) = (
            rng.range(-1.0, 1.0),
            rng.range(-1.0, 1.0),
            rng.range(0.0, 6.28),
        );
        let f = grid.field(|r, t| 1.0 + a1 * (2.0 * t + ph).cos() * r + a2 * (1.0 - r * r));
        let w = grid.circle(|t| 0.3 + 0.2 * (t + ph).sin());
        let beta = 1.2;
        let u = solve_robin_poisson(&f, &w, beta).unwrap();
        let dense = dense_polar_solve(grid, &f, &w, Bc::Robin(beta), None);
        let dev = max_dev(&u, &dense);
        assert!(dev < 1e-7, "modal vs dense oracle: {dev}");
    }
}

#[test]
fn dirichlet_solver_matches_dense_oracle() {
    let grid = DiskGrid::new(32, 32).unwrap();
    let f = grid.field(|r, t| (3.0 * t).cos() * r + 1.0);
    let w = grid.circle(|t| 0.5 + 0.25 * (2.0 * t).sin());
    let u = solve_dirichlet_poisson(&f, &w).unwrap();
    let dense = dense_polar_solve(grid, &f, &w, Bc::Dirichlet, None);
    let dev = max_dev(&u, &dense);
    assert!(dev < 1e-7, "modal vs dense oracle: {dev}");
}

#[test]
fn coupled_solver_matches_dense_oracle() {
    let grid = DiskGrid::new(32, 32).unwrap();
    let f = grid.field(|r, t| 0.5 + (1.0 - r) * (1.0 + 0.4 * (2.0 * t).sin()));
    let g = grid.circle(|t| 1.0 + 0.3 * t.cos());
    let m1 = grid.field(|r, t| 0.2 * (1.0 - r) * (1.0 + 0.5 * (t + 0.3).cos()));
    let m2 = grid.circle(|t| 0.8 + 0.2 * (3.0 * t).sin());
    let beta = 1.0;
    let out = solve_coupled_poisson(&f, &g, &m1, &m2, beta).unwrap();
    // oracle: dense solve of the bulk system with the surface solution as
    // boundary data (the surface chain is checked separately below)
    let dense = dense_polar_solve(grid, &f, &out.boundary, Bc::Robin(beta), Some(&m1));
    let dev = max_dev(&out.u, &dense);
    assert!(dev < 1e-6, "coupled vs dense oracle: {dev}");
    // surface equation residual, dense evaluation
    let dth = grid.dtheta();
    let m = grid.m;
    for j in 0..m {
        let lhs = (2.0 * out.boundary.values[j]
            - out.boundary.values[(j + 1) % m]
            - out.boundary.values[(j + m - 1) % m])
            / (dth * dth)
            + m2.values[j] * out.boundary.values[j];
        assert!((lhs - g.values[j]).abs() < 1e-9, "surface residual at {j}");
    }
}

#[test]
fn rigidity_contrapositive_margins() {
    // interpolate between a symmetric field and an asymmetric one: the
    // L²-asymmetry of f grows along s, and so must the norm margin
    let grid = DiskGrid::new(48, 64).unwrap();
    let base = grid
        .field(|r, t| 1.0 + 0.5 * (2.0 * t).cos() * r + 0.35 * (5.0 * t + 1.1).cos() * (1.0 - r));
    let sym = cap_symmetrize_disk(&base).unwrap();
    let mut last_margin = 0.0;
    let mut last_dist = 0.0;
    for s in [0.25, 0.5, 1.0] {
        let f = PolarField::new(
            base.rings
                .iter()
                .zip(&sym.rings)
                .map(|((r, a), (_, b))| {
                    let vals: Vec<f64> = a
                        .values
                        .iter()
                        .zip(&b.values)
                        .map(|(x, y)| s * x + (1.0 - s) * y)
                        .collect();
                    (*r, CircleField::new(*r, vals).unwrap())
                })
                .collect(),
        )
        .unwrap();
        let w = grid.circle(|_| 0.0);
        let rep = talenti_verify(
            &TalentiProblem::Robin {
                f: f.clone(),
                w,
                robin_beta: 1.0,
            },
            1e-8,
        )
        .unwrap();
        let n2u = rep.norms.iter().find(|n| n.p == 2.0).unwrap().norm_u;
        let n2v = rep.norms.iter().find(|n| n.p == 2.0).unwrap().norm_v;
        let margin = n2v - n2u;
        let fs = cap_symmetrize_disk(&f).unwrap();
        let dist = {
            let mut acc = 0.0;
            for (i, ((_, a), (_, b))) in f.rings.iter().zip(&fs.rings).enumerate() {
                let rw = grid.radius(i) * grid.dr() * grid.dtheta();
                for (x, y) in a.values.iter().zip(&b.values) {
                    acc += (x - y) * (x - y) * rw;
                }
            }
            acc.sqrt()
        };
        assert!(rep.comparison.holds);
        assert!(dist > last_dist, "asymmetry must grow along s");
        assert!(margin > 0.0, "margin at s = {s}: {margin}");
        assert!(margin > last_margin, "margin must grow with asymmetry");
        last_margin = margin;
        last_dist = dist;
    }
}
