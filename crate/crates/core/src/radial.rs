//! Principal eigencouple of the coupled system on the ball of radius `R`
//! in dimension `d`, by radial ODE shooting.
//!
//! With `λ̄ = λ - c_i` and `λ̃ = λ + c_b - 1`, the radial profile satisfies
//!
//! ```text
//!   u'' + (d-1)/r · u' = -λ̄ u      on (0, R),
//! ```
//!
//! while the surface unknown is a constant `v` tied to the trace by
//! `u(R) = -λ̃ v` and `u'(R) = v (1 + λ̃)`. Eliminating `v` gives the
//! shooting residual `R̃(λ) = λ̃ (u'(R) + u(R)) + u(R)`, kept in the
//! λ̃-multiplied form so it stays finite at λ̃ = 0.

use thiserror::Error;

pub(crate) const DEFAULT_GRID_N: usize = 4096;

#[derive(Debug, Error)]
pub enum RadialError {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error(
        "no positivity-compatible root in bracket ({lo}, {hi}); residuals {res_lo:.3e} / {res_hi:.3e}"
    )]
    NoRootInBracket {
        lo: f64,
        hi: f64,
        res_lo: f64,
        res_hi: f64,
    },
    #[error("root at lambda = {lambda} rejected: eigenfunction changes sign")]
    PositivityViolated { lambda: f64 },
    #[error("no sign change of the shooting residual below upper bound {upper}")]
    BracketFailure { upper: f64 },
    #[error("assertion breach: {0}")]
    AssertionBreach(String),
}

/// Surface area of the unit sphere S^{d-1}.
pub fn unit_sphere_area(d: usize) -> f64 {
    // ω_{d-1} = 2 π^{d/2} / Γ(d/2), Γ on half-integers by recurrence
    let half = d as f64 / 2.0;
    let mut gamma = if d % 2 == 0 {
        1.0
    } else {
        std::f64::consts::PI.sqrt()
    };
    let mut x = if d % 2 == 0 { 1.0 } else { 0.5 };
    while x < half - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half) / gamma
}

/// Ball volume of radius `r` in dimension `d`.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    unit_sphere_area(d) * r.powi(d as i32) / d as f64
}

/// Principal eigencouple on the ball: eigenvalue, shifted eigenvalues,
/// radial samples of `u` and `u'`, constant boundary value `v` and the
/// normal derivatives at `r = R`.
#[derive(Debug, Clone)]
pub struct BallEigen {
    pub d: usize,
    pub radius: f64,
    pub c_i: f64,
    pub c_b: f64,
    pub lambda: f64,
    /// λ̄ = λ - c_i
    pub lambda_bar: f64,
    /// λ̃ = λ + c_b - 1 (negative for every positive eigencouple)
    pub lambda_tilde: f64,
    /// samples of u at r_j = R (j+1)/grid_n, j = 0..grid_n-1
    pub u: Vec<f64>,
    /// samples of u' on the same grid
    pub du: Vec<f64>,
    pub v: f64,
    /// ∂_ν u = u'(R)
    pub du_at_r: f64,
    /// ∂_νν u = u''(R), from the ODE: -(d-1)/R u'(R) - λ̄ u(R)
    pub d2u_at_r: f64,
    /// mean curvature H = (d-1)/R
    pub mean_curvature: f64,
}

impl BallEigen {
    pub fn grid_n(&self) -> usize {
        self.u.len()
    }

    /// Radial grid r_j = R (j+1)/grid_n.
    pub fn radii(&self) -> impl Iterator<Item = f64> + '_ {
        let n = self.u.len();
        let r = self.radius;
        (0..n).map(move |j| r * (j + 1) as f64 / n as f64)
    }

    pub fn u_at_boundary(&self) -> f64 {
        *self.u.last().unwrap()
    }

    /// ∫_B u² + ∫_Σ v² by trapezoid quadrature on the sample grid.
    pub fn coupled_norm_sq(&self) -> f64 {
        let area = unit_sphere_area(self.d);
        let bulk = radial_integral(self.d, self.radius, &self.u, |u| u * u);
        bulk + area * self.radius.powi(self.d as i32 - 1) * self.v * self.v
    }

    /// The Rayleigh quotient of the stored samples; reproduces `lambda` up
    /// to quadrature error.
    pub fn rayleigh_quotient(&self) -> f64 {
        let area = unit_sphere_area(self.d);
        let rpow = self.radius.powi(self.d as i32 - 1);
        let grad = radial_integral(self.d, self.radius, &self.du, |g| g * g);
        let mass = radial_integral(self.d, self.radius, &self.u, |u| u * u);
        let exch = area * rpow * (self.u_at_boundary() - self.v).powi(2);
        let num = grad + self.c_i * mass + exch - self.c_b * area * rpow * self.v * self.v;
        let den = mass + area * rpow * self.v * self.v;
        num / den
    }
}

/// ∫_B φ(f) with radial samples f_j at r_j = R (j+1)/n: trapezoid in r with
/// weight ω_{d-1} r^{d-1}, plus the inner disc [0, r_0] where f ≈ f_0.
fn radial_integral(d: usize, radius: f64, samples: &[f64], phi: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len();
    let h = radius / n as f64;
    let area = unit_sphere_area(d);
    let w = |j: usize| (radius * (j + 1) as f64 / n as f64).powi(d as i32 - 1);
    let mut s = 0.0;
    for j in 0..n - 1 {
        s += 0.5 * h * (phi(samples[j]) * w(j) + phi(samples[j + 1]) * w(j + 1));
    }
    // center cap: f constant to O(r_0²)
    s += phi(samples[0]) * h.powi(d as i32) / d as f64;
    area * s
}

/// One RK4 shot of the radial equation u'' = -(d-1)/r u' - λ̄ u from
/// r_0 = R/n with series data u(r_0) = 1, u'(r_0) = -λ̄ r_0 / d.
struct Shot {
    u: Vec<f64>,
    du: Vec<f64>,
}

fn shoot(d: usize, radius: f64, lambda_bar: f64, grid_n: usize) -> Shot {
    let n = grid_n;
    let h = radius / n as f64;
    let dm1 = (d - 1) as f64;
    let f = |r: f64, u: f64, p: f64| -> (f64, f64) { (p, -dm1 / r * p - lambda_bar * u) };
    let mut u = Vec::with_capacity(n);
    let mut du = Vec::with_capacity(n);
    let r0 = h;
    let mut cur = (1.0, -lambda_bar * r0 / d as f64);
    u.push(cur.0);
    du.push(cur.1);
    for j in 0..n - 1 {
        let r = r0 + j as f64 * h;
        let k1 = f(r, cur.0, cur.1);
        let k2 = f(r + 0.5 * h, cur.0 + 0.5 * h * k1.0, cur.1 + 0.5 * h * k1.1);
        let k3 = f(r + 0.5 * h, cur.0 + 0.5 * h * k2.0, cur.1 + 0.5 * h * k2.1);
        let k4 = f(r + h, cur.0 + h * k3.0, cur.1 + h * k3.1);
        cur.0 += h / 6.0 * (k1.0 + 2.0 * k2.0 + 2.0 * k3.0 + k4.0);
        cur.1 += h / 6.0 * (k1.1 + 2.0 * k2.1 + 2.0 * k3.1 + k4.1);
        u.push(cur.0);
        du.push(cur.1);
    }
    Shot { u, du }
}

/// Shooting residual R̃(λ) = λ̃ (u'(R) + u(R)) + u(R).
fn shooting_residual(
    d: usize,
    radius: f64,
    c_i: f64,
    c_b: f64,
    lambda: f64,
    grid_n: usize,
) -> (f64, Shot) {
    let shot = shoot(d, radius, lambda - c_i, grid_n);
    let ub = *shot.u.last().unwrap();
    let dub = *shot.du.last().unwrap();
    let lt = lambda + c_b - 1.0;
    (lt * (dub + ub) + ub, shot)
}

fn is_positive(shot: &Shot) -> bool {
    shot.u.iter().all(|&x| x > 0.0)
}

/// Computes the principal eigencouple on the ball of radius `radius`.
///
/// The eigenvalue is bracketed by `(min(c_i, -c_b), min(max(c_i, -c_b), 1 - c_b))`:
/// the outer bounds are the strict two-sided estimates for the eigenvalue,
/// and the cap at `1 - c_b` encodes λ̃ < 0, which every positive eigencouple
/// satisfies through `u(R) = -λ̃ v`. At `c_i = -c_b` the bracket collapses
/// and the constant eigencouple with λ = c_i is returned directly.
pub fn solve_principal_ball(
    d: usize,
    radius: f64,
    c_i: f64,
    c_b: f64,
    grid_n: usize,
) -> Result<BallEigen, RadialError> {
    if d < 2 {
        return Err(RadialError::InvalidInput(format!("dimension {d} < 2")));
    }
    if !(radius > 0.0) {
        return Err(RadialError::InvalidInput(format!("radius {radius} <= 0")));
    }
    if grid_n < 64 {
        return Err(RadialError::InvalidInput(format!("grid_n {grid_n} < 64")));
    }

    if c_i == -c_b {
        return Ok(constant_eigencouple(d, radius, c_i, c_b, grid_n));
    }

    let lo = c_i.min(-c_b);
    let hi = c_i.max(-c_b).min(1.0 - c_b);
    debug_assert!(lo < hi);

    // Candidate λ grid: uniform subdivision plus a geometric tail toward the
    // lower end, where the principal root sits when c_i << 0.
    let mut probes: Vec<f64> = (0..=512)
        .map(|i| lo + (hi - lo) * i as f64 / 512.0)
        .collect();
    for j in 1..48 {
        probes.push(lo + (hi - lo) * 0.5f64.powi(j));
    }
    probes.sort_by(f64::total_cmp);
    probes.dedup();

    let res_at = |lambda: f64| shooting_residual(d, radius, c_i, c_b, lambda, grid_n);

    let mut prev = probes[0];
    let (mut prev_res, _) = res_at(prev);
    let first_res = prev_res;
    let mut last_res = prev_res;
    let mut saw_root = false;
    for &p in &probes[1..] {
        let (r, _) = res_at(p);
        last_res = r;
        if prev_res == 0.0 || prev_res.signum() != r.signum() {
            // refine in [prev, p]
            if let Some(eig) = refine_root(d, radius, c_i, c_b, grid_n, prev, p) {
                return Ok(eig);
            }
            saw_root = true;
        }
        prev = p;
        prev_res = r;
    }
    if saw_root {
        Err(RadialError::PositivityViolated { lambda: f64::NAN })
    } else {
        Err(RadialError::NoRootInBracket {
            lo,
            hi,
            res_lo: first_res,
            res_hi: last_res,
        })
    }
}

/// Bisection to near-convergence, then 3 secant polish steps; rejects the
/// root if the eigenfunction changes sign.
fn refine_root(
    d: usize,
    radius: f64,
    c_i: f64,
    c_b: f64,
    grid_n: usize,
    mut a: f64,
    mut b: f64,
) -> Option<BallEigen> {
    let res = |lambda: f64| shooting_residual(d, radius, c_i, c_b, lambda, grid_n).0;
    let mut fa = res(a);
    let fb = res(b);
    if fa == 0.0 {
        return finalize(d, radius, c_i, c_b, grid_n, a);
    }
    if fb == 0.0 {
        return finalize(d, radius, c_i, c_b, grid_n, b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = res(mid);
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
        if (b - a).abs() < 1e-13 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
    }
    // secant polish
    let mut x0 = a;
    let mut x1 = b.max(a + f64::EPSILON * (1.0 + a.abs()));
    let mut f0 = res(x0);
    let mut f1 = res(x1);
    for _ in 0..3 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = res(x1);
    }
    let lambda = if f1.abs() <= f0.abs() { x1 } else { x0 };
    finalize(d, radius, c_i, c_b, grid_n, lambda)
}

/// Residual scale used to decide the final root is converged.
fn residual_scale(shot: &Shot, lambda_tilde: f64) -> f64 {
    let ub = shot.u.last().unwrap().abs();
    let dub = shot.du.last().unwrap().abs();
    (lambda_tilde.abs() * (dub + ub) + ub).max(1e-30)
}

fn finalize(
    d: usize,
    radius: f64,
    c_i: f64,
    c_b: f64,
    grid_n: usize,
    lambda: f64,
) -> Option<BallEigen> {
    let (res, shot) = shooting_residual(d, radius, c_i, c_b, lambda, grid_n);
    let lt = lambda + c_b - 1.0;
    if res.abs() > 1e-12 * residual_scale(&shot, lt) * 1e3 {
        // refinement failed to reach tolerance; treat as no root here
        return None;
    }
    if !is_positive(&shot) {
        return None;
    }
    Some(normalize(d, radius, c_i, c_b, lambda, shot))
}

fn normalize(d: usize, radius: f64, c_i: f64, c_b: f64, lambda: f64, shot: Shot) -> BallEigen {
    let lb = lambda - c_i;
    let lt = lambda + c_b - 1.0;
    assert!(
        lt < 0.0,
        "assertion breach: lambda_tilde = {lt} >= 0 at a positive eigencouple"
    );
    let ub = *shot.u.last().unwrap();
    let v = -ub / lt;
    let area = unit_sphere_area(d);
    let bulk = radial_integral(d, radius, &shot.u, |u| u * u);
    let norm_sq = bulk + area * radius.powi(d as i32 - 1) * v * v;
    let scale = norm_sq.sqrt().recip();
    let u: Vec<f64> = shot.u.iter().map(|x| x * scale).collect();
    let du: Vec<f64> = shot.du.iter().map(|x| x * scale).collect();
    let ubs = *u.last().unwrap();
    let dubs = *du.last().unwrap();
    BallEigen {
        d,
        radius,
        c_i,
        c_b,
        lambda,
        lambda_bar: lb,
        lambda_tilde: lt,
        u,
        du,
        v: v * scale,
        du_at_r: dubs,
        d2u_at_r: -(d as f64 - 1.0) / radius * dubs - lb * ubs,
        mean_curvature: (d as f64 - 1.0) / radius,
    }
}

fn constant_eigencouple(d: usize, radius: f64, c_i: f64, c_b: f64, grid_n: usize) -> BallEigen {
    // λ = c_i, λ̄ = 0, λ̃ = -1, u ≡ v
    let area = unit_sphere_area(d);
    let norm_sq = area * (radius.powi(d as i32) / d as f64 + radius.powi(d as i32 - 1));
    let c = norm_sq.sqrt().recip();
    BallEigen {
        d,
        radius,
        c_i,
        c_b,
        lambda: c_i,
        lambda_bar: 0.0,
        lambda_tilde: -1.0,
        u: vec![c; grid_n],
        du: vec![0.0; grid_n],
        v: c,
        du_at_r: 0.0,
        d2u_at_r: 0.0,
        mean_curvature: (d as f64 - 1.0) / radius,
    }
}

/// Smallest eigenvalue of -Δ on the unit ball with boundary condition
/// ∂_ν u + robin_beta · u = 0, by radial shooting.
pub fn robin_eigenvalue(d: usize, robin_beta: f64, grid_n: usize) -> Result<f64, RadialError> {
    if d < 2 || grid_n < 64 {
        return Err(RadialError::InvalidInput(format!(
            "d = {d}, grid_n = {grid_n}"
        )));
    }
    if robin_beta < 0.0 {
        return Err(RadialError::InvalidInput(format!(
            "robin_beta {robin_beta} < 0"
        )));
    }
    if robin_beta == 0.0 {
        return Ok(0.0); // Neumann: constant eigenfunction
    }
    let g = |lambda: f64| -> (f64, Shot) {
        let shot = shoot(d, 1.0, lambda, grid_n);
        (
            shot.du.last().unwrap() + robin_beta * shot.u.last().unwrap(),
            shot,
        )
    };
    // g(0) = robin_beta > 0; grow the upper bound until the residual flips.
    let mut prev = 0.0;
    let mut upper = 0.5 * (1.0 + robin_beta);
    let mut found = None;
    for _ in 0..60 {
        let (val, _) = g(upper);
        if val <= 0.0 {
            found = Some((prev, upper));
            break;
        }
        prev = upper;
        upper *= 2.0;
    }
    let (mut a, mut b) = found.ok_or(RadialError::BracketFailure { upper })?;
    let mut fa = g(a).0;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        if mid == a || mid == b {
            break;
        }
        let fm = g(mid).0;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if fm.signum() == fa.signum() {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    // secant polish
    let (mut x0, mut x1) = (a, b.max(a + f64::EPSILON));
    let (mut f0, mut f1) = (g(x0).0, g(x1).0);
    for _ in 0..3 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() {
            break;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = g(x1).0;
    }
    let lambda = if f1.abs() <= f0.abs() { x1 } else { x0 };
    let (_, shot) = g(lambda);
    if !is_positive(&shot) {
        return Err(RadialError::PositivityViolated { lambda });
    }
    Ok(lambda)
}

/// Scans `l(c_i) = λ_{c_i,0}(B) - c_i` along a strictly decreasing list of
/// `c_i <= -1`. The gap is positive, non-increasing as a function of `c_i`,
/// and converges to the β = 1 Robin eigenvalue as `c_i → -∞`.
pub fn limit_gap_scan(d: usize, c_i_list: &[f64]) -> Result<Vec<(f64, f64)>, RadialError> {
    if c_i_list.is_empty() {
        return Err(RadialError::InvalidInput("empty c_i list".into()));
    }
    for w in c_i_list.windows(2) {
        if !(w[1] < w[0]) {
            return Err(RadialError::InvalidInput(
                "c_i list must be strictly decreasing".into(),
            ));
        }
    }
    if c_i_list[0] > -1.0 {
        return Err(RadialError::InvalidInput("c_i values must be <= -1".into()));
    }
    c_i_list
        .iter()
        .map(|&c_i| {
            let eig = solve_principal_ball(d, 1.0, c_i, 0.0, DEFAULT_GRID_N)?;
            Ok((c_i, eig.lambda - c_i))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_areas() {
        assert!((unit_sphere_area(2) - 2.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!((unit_sphere_area(3) - 4.0 * std::f64::consts::PI).abs() < 1e-14);
        assert!(
            (unit_sphere_area(4) - 2.0 * std::f64::consts::PI * std::f64::consts::PI).abs() < 1e-13
        );
    }

    #[test]
    fn zero_potentials_give_zero_eigenvalue() {
        let eig = solve_principal_ball(2, 1.0, 0.0, 0.0, 256).unwrap();
        assert!(eig.lambda.abs() < 1e-12);
        // constants with u(1) = v
        assert!((eig.u_at_boundary() - eig.v).abs() < 1e-12);
        let spread = eig
            .u
            .iter()
            .fold((f64::MAX, f64::MIN), |(lo, hi), &x| (lo.min(x), hi.max(x)));
        assert!(spread.1 - spread.0 < 1e-14);
    }

    #[test]
    fn opposite_constants_force_lambda_c() {
        let eig = solve_principal_ball(3, 1.0, 2.5, -2.5, 128).unwrap();
        assert!((eig.lambda - 2.5).abs() < 1e-12);
        assert!((eig.u_at_boundary() - eig.v).abs() < 1e-12);
    }

    #[test]
    fn eigenvalue_bracket_strict() {
        let eig = solve_principal_ball(2, 1.0, 1.0, 0.0, 2048).unwrap();
        assert!(eig.lambda > 0.0 && eig.lambda < 1.0);
        let eig = solve_principal_ball(3, 1.0, -3.0, 0.5, 2048).unwrap();
        assert!(eig.lambda > -3.0 && eig.lambda < -0.5);
    }

    #[test]
    fn normalization_and_boundary_relations() {
        let eig = solve_principal_ball(2, 1.0, 1.0, 0.0, 4096).unwrap();
        assert!((eig.coupled_norm_sq() - 1.0).abs() < 1e-10);
        // u(1) = -λ̃ v and u'(1) = v (1 + λ̃)
        assert!((eig.u_at_boundary() + eig.lambda_tilde * eig.v).abs() < 1e-8);
        assert!((eig.du_at_r - eig.v * (1.0 + eig.lambda_tilde)).abs() < 1e-8);
        assert!(eig.lambda_tilde < 0.0);
        // ∂_νν u from the radial equation
        let expect = -(eig.d as f64 - 1.0) * eig.du_at_r - eig.lambda_bar * eig.u_at_boundary();
        assert!((eig.d2u_at_r - expect).abs() < 1e-8);
    }

    #[test]
    fn rayleigh_quotient_reproduces_lambda() {
        for (ci, cb) in [(1.0, 0.0), (-3.0, 0.5), (-20.0, 0.0)] {
            let eig = solve_principal_ball(2, 1.0, ci, cb, 4096).unwrap();
            assert!(
                (eig.rayleigh_quotient() - eig.lambda).abs() < 1e-6,
                "rq mismatch at ({ci},{cb}): {} vs {}",
                eig.rayleigh_quotient(),
                eig.lambda
            );
        }
    }

    #[test]
    fn grid_refinement_order() {
        // λ error should shrink like grid_n^{-2}; measured order >= 1.8
        let reference = solve_principal_ball(2, 1.0, 1.0, 0.0, 65536)
            .unwrap()
            .lambda;
        let l1 = solve_principal_ball(2, 1.0, 1.0, 0.0, 256).unwrap().lambda;
        let l2 = solve_principal_ball(2, 1.0, 1.0, 0.0, 512).unwrap().lambda;
        let l3 = solve_principal_ball(2, 1.0, 1.0, 0.0, 1024).unwrap().lambda;
        let e1 = (l1 - reference).abs();
        let e2 = (l2 - reference).abs();
        let e3 = (l3 - reference).abs();
        let order12 = (e1 / e2).log2();
        let order23 = (e2 / e3).log2();
        assert!(order12 >= 1.8, "order {order12}");
        assert!(order23 >= 1.8, "order {order23}");
    }

    #[test]
    fn radius_scaling_matches_dirichlet_free_case() {
        // for c_i = c_b = 0 any radius still gives λ = 0 constants
        let eig = solve_principal_ball(2, 0.7, 0.0, 0.0, 128).unwrap();
        assert!(eig.lambda.abs() < 1e-12);
        assert!((eig.coupled_norm_sq() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn robin_neumann_and_monotonicity() {
        assert_eq!(robin_eigenvalue(2, 0.0, 256).unwrap(), 0.0);
        let l1 = robin_eigenvalue(2, 0.5, 2048).unwrap();
        let l2 = robin_eigenvalue(2, 2.0, 2048).unwrap();
        assert!(l1 > 0.0);
        assert!(l1 < l2, "Rayleigh quotient monotone in robin_beta");
    }

    #[test]
    fn robin_disk_beta_one_reference() {
        // β = 1, d = 2: λ solves sqrt(λ) J1(sqrt(λ)) = J0(sqrt(λ)); root ≈ 1.5770
        let l = robin_eigenvalue(2, 1.0, 8192).unwrap();
        assert!((l - 1.5770).abs() < 2e-3, "lambda_R = {l}");
    }

    #[test]
    fn limit_gap_is_definitionally_consistent() {
        let rows = limit_gap_scan(2, &[-4.0]).unwrap();
        let eig = solve_principal_ball(2, 1.0, -4.0, 0.0, DEFAULT_GRID_N).unwrap();
        assert_eq!(rows[0].1, eig.lambda - (-4.0));
    }

    #[test]
    fn limit_gap_monotone_toward_robin() {
        let rows = limit_gap_scan(2, &[-10.0, -50.0, -200.0]).unwrap();
        // l is non-increasing in c_i, so scanning down in c_i the gap grows
        assert!(rows[1].1 >= rows[0].1 - 1e-9);
        assert!(rows[2].1 >= rows[1].1 - 1e-9);
        for (_, l) in &rows {
            assert!(*l > 0.0);
        }
        let robin = robin_eigenvalue(2, 1.0, DEFAULT_GRID_N).unwrap();
        let rel = (rows[2].1 - robin).abs() / robin;
        assert!(rel < 0.01, "relative gap {rel}");
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(matches!(
            solve_principal_ball(1, 1.0, 0.0, 0.0, 128),
            Err(RadialError::InvalidInput(_))
        ));
        assert!(matches!(
            solve_principal_ball(2, -1.0, 0.0, 0.0, 128),
            Err(RadialError::InvalidInput(_))
        ));
        assert!(matches!(
            solve_principal_ball(2, 1.0, 0.0, 0.0, 32),
            Err(RadialError::InvalidInput(_))
        ));
        assert!(matches!(
            limit_gap_scan(2, &[-1.0, -0.5]),
            Err(RadialError::InvalidInput(_))
        ));
    }
}
