//! First-order criticality data and the diagonalized second-order shape
//! derivative of the volume-constrained Lagrangian at the unit ball.
//!
//! Writing the boundary perturbation in spherical harmonics of degree `k`
//! (Laplace-Beltrami eigenvalue `σ_k = k(k+d-2)`), the Hessian of
//! `λ - μ·Vol` at the ball is diagonal with coefficients
//!
//! ```text
//!   a_k = β (σ_k - H) + ( γ/(σ_k - λ̃) + δ ) (p_k(1) + ∂_ν u),
//! ```
//!
//! where `β = -u ∂_ν u`, `γ = -2 ∂_ν u`, `δ = -2((H-1) ∂_ν u + λ̄ u)` on the
//! sphere, and `p_k` solves a homogeneous radial problem with a Robin-type
//! boundary condition. The sign pattern of the `a_k` decides second-order
//! optimality of the ball.

use crate::radial::BallEigen;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HessianError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("resonant boundary condition at degree {k}: {detail}")]
    ResonantBoundary { k: usize, detail: String },
}

/// Coefficients of the second shape derivative at the unit ball, plus the
/// Lagrange multiplier of the volume constraint.
#[derive(Debug, Clone, Copy)]
pub struct BallCoefficients {
    pub coeff_alpha: f64,
    pub coeff_beta: f64,
    pub coeff_gamma: f64,
    pub coeff_delta: f64,
    pub mu: f64,
}

/// Per-degree record of the diagonalized Hessian.
#[derive(Debug, Clone, Copy)]
pub struct HessianRow {
    pub k: usize,
    pub sigma_k: f64,
    pub d_k: f64,
    pub p_k1: f64,
    pub q_k: f64,
    pub a_k: f64,
}

/// Laplace-Beltrami eigenvalue of degree-k spherical harmonics on S^{d-1}.
pub fn sigma_k(k: usize, d: usize) -> f64 {
    (k as f64) * (k as f64 + d as f64 - 2.0)
}

fn require_unit_ball(eig: &BallEigen) -> Result<(), HessianError> {
    if (eig.radius - 1.0).abs() > 1e-12 {
        return Err(HessianError::InvalidInput(format!(
            "ball radius must be 1, got {}",
            eig.radius
        )));
    }
    Ok(())
}

/// Second-derivative coefficients and Lagrange multiplier from the boundary
/// data of the eigencouple.
pub fn ball_coefficients(eig: &BallEigen) -> Result<BallCoefficients, HessianError> {
    require_unit_ball(eig)?;
    let h = eig.mean_curvature;
    let u1 = eig.u_at_boundary();
    let dnu = eig.du_at_r;
    let lb = eig.lambda_bar;
    let lt = eig.lambda_tilde;
    let v = eig.v;
    let coeff_beta = -u1 * dnu;
    let coeff_gamma = -2.0 * dnu;
    let coeff_delta = -2.0 * ((h - 1.0) * dnu + lb * u1);
    let coeff_alpha = dnu * (-2.0 * (h - 1.0) * dnu + u1 * (h - 2.0 * lb));
    let mu = -dnu * dnu - lb * u1 * u1 + h * (u1 * u1 - 2.0 * u1 * v - lt * v * v);
    Ok(BallCoefficients {
        coeff_alpha,
        coeff_beta,
        coeff_gamma,
        coeff_delta,
        mu,
    })
}

/// Shoots the homogeneous radial problem for degree `k`:
///
/// ```text
///   -r^{1-d} (r^{d-1} p')' + (σ_k/r² - λ̄) p = 0   on (0, 1),
///   p'(1) + d_k p(1) = -d_k ∂_ν u - ∂_νν u,
/// ```
///
/// with `d_k = 1 - 1/(σ_k - λ̃)`, and returns `(p_k(1), q_k)` where
/// `q_k = (p_k(1) + ∂_ν u)/(σ_k - λ̃)`.
pub fn solve_pk(k: usize, eig: &BallEigen, grid_n: usize) -> Result<(f64, f64), HessianError> {
    let (p_k1, q_k, _) = solve_pk_impl(k, eig, grid_n, false)?;
    Ok((p_k1, q_k))
}

/// Same as [`solve_pk`] but also returns the scaled profile on the grid
/// r_j = (j+1)/grid_n. Intended for low degrees.
pub fn solve_pk_profile(
    k: usize,
    eig: &BallEigen,
    grid_n: usize,
) -> Result<(f64, f64, Vec<f64>), HessianError> {
    let (p, q, prof) = solve_pk_impl(k, eig, grid_n, true)?;
    Ok((p, q, prof.unwrap()))
}

fn solve_pk_impl(
    k: usize,
    eig: &BallEigen,
    grid_n: usize,
    want_profile: bool,
) -> Result<(f64, f64, Option<Vec<f64>>), HessianError> {
    require_unit_ball(eig)?;
    if k < 1 {
        return Err(HessianError::InvalidInput("degree k must be >= 1".into()));
    }
    if grid_n < 64 {
        return Err(HessianError::InvalidInput(format!("grid_n {grid_n} < 64")));
    }
    let sk = sigma_k(k, eig.d);
    let denom_k = sk - eig.lambda_tilde;
    if denom_k.abs() < 1e-10 {
        return Err(HessianError::ResonantBoundary {
            k,
            detail: format!("sigma_k - lambda_tilde = {denom_k:.3e}"),
        });
    }
    let d_k = 1.0 - 1.0 / denom_k;

    let lb = eig.lambda_bar;
    let d = eig.d as f64;
    let h = 1.0 / grid_n as f64;
    // The regular solution grows like r^k; to keep RK4 stable the start
    // radius is pushed out so k/r·h stays small. Contamination by the
    // singular branch decays like (r_start/r)^{2k+d-2}, so the late start
    // costs nothing at r = 1.
    let start_idx = ((4.0 * k as f64).ceil() as usize).clamp(1, (grid_n * 3) / 5);
    let r_start = start_idx as f64 * h;

    let f = |r: f64, p: f64, s: f64| -> (f64, f64) {
        (s, -(d - 1.0) / r * s + (sk / (r * r) - lb) * p)
    };
    // scale-free start: p = 1, p' = k / r_start (slope of r^k)
    let mut p = 1.0;
    let mut s = k as f64 / r_start;
    // per-sample log-scale bookkeeping so large-k growth cannot overflow
    let mut raw = if want_profile {
        Some(vec![0.0f64; grid_n])
    } else {
        None
    };
    let mut logs = if want_profile {
        Some(vec![0.0f64; grid_n])
    } else {
        None
    };
    let mut log_scale = 0.0f64;
    if let (Some(raw), Some(logs)) = (raw.as_mut(), logs.as_mut()) {
        raw[start_idx - 1] = p;
        logs[start_idx - 1] = log_scale;
    }
    for j in start_idx..grid_n {
        let r = (j as f64) * h; // integrate sample j-1 (radius j*h) -> sample j
        let k1 = f(r, p, s);
        let k2 = f(r + 0.5 * h, p + 0.5 * h * k1.0, s + 0.5 * h * k1.1);
        let k3 = f(r + 0.5 * h, p + 0.5 * h * k2.0, s + 0.5 * h * k2.1);
        let k4 = f(r + h, p + h * k3.0, s + h * k3.1);
        p += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        s += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        let mag = p.abs().max(s.abs());
        if mag > 1e100 {
            p /= mag;
            s /= mag;
            log_scale += mag.ln();
        }
        if let (Some(raw), Some(logs)) = (raw.as_mut(), logs.as_mut()) {
            raw[j] = p;
            logs[j] = log_scale;
        }
    }
    // boundary scaling from the shot direction (p, s) at r = 1
    let shot_norm = p.abs().max(s.abs()).max(1e-300);
    let bc = s + d_k * p;
    if bc.abs() < 1e-12 * shot_norm {
        return Err(HessianError::ResonantBoundary {
            k,
            detail: format!(
                "|phi'(1) + d_k phi(1)| = {:.3e} relative to the shot",
                bc.abs() / shot_norm
            ),
        });
    }
    let rhs = -d_k * eig.du_at_r - eig.d2u_at_r;
    let scale = rhs / bc;
    let p_k1 = scale * p;
    let q_k = (p_k1 + eig.du_at_r) / denom_k;

    let profile = match (raw, logs) {
        (Some(raw), Some(logs)) => {
            let log_end = log_scale;
            let mut prof = vec![0.0; grid_n];
            for j in (start_idx - 1)..grid_n {
                prof[j] = scale * raw[j] * (logs[j] - log_end).exp();
            }
            // ahead of the start radius the regular branch is r^k times the
            // first computed sample
            let first = prof[start_idx - 1];
            for j in 0..start_idx.saturating_sub(1) {
                let r = (j + 1) as f64 * h;
                prof[j] = first * (r / r_start).powi(k as i32);
            }
            Some(prof)
        }
        _ => None,
    };
    Ok((p_k1, q_k, profile))
}

/// Assembles the degree-k diagonal coefficient of the Hessian.
pub fn hessian_row(k: usize, eig: &BallEigen) -> Result<HessianRow, HessianError> {
    hessian_row_with(k, eig, &ball_coefficients(eig)?, eig.grid_n())
}

/// Variant taking precomputed coefficients, to avoid recomputing them along
/// a scan over k.
pub fn hessian_row_with(
    k: usize,
    eig: &BallEigen,
    coeffs: &BallCoefficients,
    grid_n: usize,
) -> Result<HessianRow, HessianError> {
    let sk = sigma_k(k, eig.d);
    let denom = sk - eig.lambda_tilde;
    let (p_k1, q_k) = solve_pk(k, eig, grid_n)?;
    let d_k = 1.0 - 1.0 / denom;
    let a_k = coeffs.coeff_beta * (sk - eig.mean_curvature)
        + (coeffs.coeff_gamma / denom + coeffs.coeff_delta) * (p_k1 + eig.du_at_r);
    Ok(HessianRow {
        k,
        sigma_k: sk,
        d_k,
        p_k1,
        q_k,
        a_k,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegimeVerdict {
    NegativeDirectionFound,
    CoerciveUpToKmax,
}

/// Tail state for degrees beyond `k_max`: when `β > 0` the asymptotic
/// `a_k ≈ β σ_k` is evaluated at a large probe degree, otherwise the tail
/// is reported unchecked.
#[derive(Debug, Clone, Copy)]
pub enum TailStatus {
    Certified { probe_k: usize, ratio: f64 },
    Unchecked,
}

#[derive(Debug, Clone)]
pub struct RegimeReport {
    pub d: usize,
    pub c_i: f64,
    pub c_b: f64,
    pub k_max: usize,
    /// min over 2 <= k <= k_max of a_k / (1 + σ_k); the normalization is the
    /// squared W^{1,2} norm of a unit-L² harmonic of degree k, so this is
    /// the coercivity constant of the quadratic form.
    pub min_ratio: f64,
    pub min_k: usize,
    pub verdict: RegimeVerdict,
    pub tail: TailStatus,
    /// d >= 6 sits outside the dimensions for which coercivity is proven.
    pub outside_proven_regime: bool,
    pub rows: Vec<HessianRow>,
}

/// Scans the diagonal coefficients for 2 <= k <= k_max and classifies the
/// sign pattern.
pub fn regime_scan(
    d: usize,
    c_i: f64,
    c_b: f64,
    k_max: usize,
) -> Result<RegimeReport, HessianError> {
    regime_scan_with_grid(d, c_i, c_b, k_max, crate::radial::DEFAULT_GRID_N)
}

pub fn regime_scan_with_grid(
    d: usize,
    c_i: f64,
    c_b: f64,
    k_max: usize,
    grid_n: usize,
) -> Result<RegimeReport, HessianError> {
    if k_max < 2 {
        return Err(HessianError::InvalidInput("k_max must be >= 2".into()));
    }
    let eig = crate::radial::solve_principal_ball(d, 1.0, c_i, c_b, grid_n)
        .map_err(|e| HessianError::InvalidInput(format!("ball solve failed: {e}")))?;
    let coeffs = ball_coefficients(&eig)?;
    let mut rows = Vec::with_capacity(k_max);
    let mut min_ratio = f64::INFINITY;
    let mut min_k = 2;
    for k in 1..=k_max {
        let row = hessian_row_with(k, &eig, &coeffs, grid_n)?;
        if k >= 2 {
            let ratio = row.a_k / (1.0 + row.sigma_k);
            if ratio < min_ratio {
                min_ratio = ratio;
                min_k = k;
            }
        }
        rows.push(row);
    }
    let verdict = if min_ratio < 0.0 {
        RegimeVerdict::NegativeDirectionFound
    } else {
        RegimeVerdict::CoerciveUpToKmax
    };
    let tail = if coeffs.coeff_beta > 0.0 {
        let probe_k = k_max.max(400);
        let row = hessian_row_with(probe_k, &eig, &coeffs, grid_n)?;
        TailStatus::Certified {
            probe_k,
            ratio: row.a_k / (coeffs.coeff_beta * row.sigma_k),
        }
    } else {
        TailStatus::Unchecked
    };
    Ok(RegimeReport {
        d,
        c_i,
        c_b,
        k_max,
        min_ratio,
        min_k,
        verdict,
        tail,
        outside_proven_regime: d >= 6,
        rows,
    })
}
