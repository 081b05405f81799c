//! Radial shooting against independent discretization oracles.

mod common;

use bulksurf_core::radial::{robin_eigenvalue, solve_principal_ball};

/// Smallest eigenvalue of the P1 radial discretization of
/// `-(r^{d-1} u')' = λ r^{d-1} u` with `u'(1) + β u(1) = 0`, by Sturm
/// bisection on the tridiagonal pencil (eigenvalue count from the LDLᵀ
/// inertia of A - λM).
fn radial_fd_robin_eigenvalue(d: usize, beta: f64, n: usize) -> f64 {
    let h = 1.0 / n as f64;
    // nodes r_i = i h, i = 0..n; P1 elements with weight r^{d-1}
    // element (i, i+1): stiffness w_e/h [[1,-1],[-1,1]], lumped mass
    // w_e = ∫ r^{d-1} over the element by 2-point Gauss
    let weight = |a: f64, b: f64| -> f64 {
        let g = 0.5773502691896257_f64;
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        half * ((mid - half * g).powi(d as i32 - 1) + (mid + half * g).powi(d as i32 - 1))
    };
    let count_below = |lambda: f64| -> usize {
        // assemble tridiagonal A - λM on the fly and run symmetric LDLᵀ,
        // counting negative pivots (eigenvalues below λ)
        let mut negatives = 0;
        let mut prev_pivot = 0.0f64;
        let mut prev_off = 0.0f64;
        for i in 0..=n {
            let mut diag = 0.0;
            if i > 0 {
                let (a, b) = ((i - 1) as f64 * h, i as f64 * h);
                let w = weight(a, b);
                // w carries the element length: ∫ w (φ')² = w/h²,
                // consistent mass diagonal ∫ w φ² = w/3
                diag += w / (h * h) - lambda * w / 3.0;
            }
            if i < n {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let w = weight(a, b);
                diag += w / (h * h) - lambda * w / 3.0;
            }
            if i == n {
                diag += beta; // Robin boundary, r^{d-1} = 1
            }
            let pivot = if i == 0 {
                diag
            } else {
                diag - prev_off * prev_off / prev_pivot
            };
            if pivot < 0.0 {
                negatives += 1;
            }
            prev_pivot = pivot;
            if i < n {
                let (a, b) = (i as f64 * h, (i + 1) as f64 * h);
                let w = weight(a, b);
                prev_off = -w / (h * h) - lambda * w / 6.0;
            }
        }
        negatives
    };
    let mut lo = 0.0;
    let mut hi = 2.0 * (1.0 + beta);
    while count_below(hi) == 0 {
        hi *= 2.0;
    }
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        if count_below(mid) == 0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[test]
fn robin_matches_dense_radial_discretization() {
    let reference = radial_fd_robin_eigenvalue(2, 1.0, 2000);
    let shooting = robin_eigenvalue(2, 1.0, 8192).unwrap();
    assert!(
        (shooting - reference).abs() < 1e-6,
        "shooting {shooting} vs 2000-point discretization {reference}"
    );
}

#[test]
fn robin_other_dimensions_and_betas() {
    for (d, beta) in [(3usize, 0.7), (2, 2.5)] {
        let reference = radial_fd_robin_eigenvalue(d, beta, 3000);
        let shooting = robin_eigenvalue(d, beta, 8192).unwrap();
        assert!(
            (shooting - reference).abs() < 2e-6,
            "(d={d}, beta={beta}): {shooting} vs {reference}"
        );
    }
}

#[test]
fn normalization_sign_convention_invariance() {
    // λ must not depend on the shooting amplitude; the solver normalizes,
    // so two solves of the same problem agree exactly
    let a = solve_principal_ball(3, 1.0, -2.0, 0.25, 2048).unwrap();
    let b = solve_principal_ball(3, 1.0, -2.0, 0.25, 2048).unwrap();
    assert_eq!(a.lambda, b.lambda);
    assert!(a.v > 0.0 && a.u.iter().all(|&x| x > 0.0));
}
