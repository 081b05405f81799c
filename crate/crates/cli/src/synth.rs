//! Random smooth nonnegative data for the randomized suites.
//!
//! Fields are low-order trigonometric polynomials in the angle with radial
//! modulation, kept strictly nonnegative by construction so they are valid
//! inputs for cap symmetrization.

use bulksurf_core::disk::DiskGrid;
use bulksurf_core::rng::SplitMix64;
use bulksurf_core::symmetrize::{CircleField, PolarField};

const MAX_MODE: usize = 5;

/// Nonnegative bulk field: `amp · (1 + Σ_l a_l cos(lθ + φ_l) ρ_l(r))` with
/// the mode amplitudes capped so the field stays strictly positive.
pub fn random_bulk_field(grid: DiskGrid, rng: &mut SplitMix64, amp: f64) -> PolarField {
    let n_modes = 2 + (rng.next_u64() % (MAX_MODE as u64 - 1)) as usize;
    let modes: Vec<(usize, f64, f64, f64)> = (0..n_modes)
        .map(|_| {
            let l = 1 + (rng.next_u64() % MAX_MODE as u64) as usize;
            let a = rng.range(-1.0, 1.0);
            let phase = rng.range(0.0, std::f64::consts::TAU);
            let decay = rng.range(0.0, 2.0);
            (l, a, phase, decay)
        })
        .collect();
    let total: f64 = modes.iter().map(|(_, a, _, _)| a.abs()).sum();
    let scale = if total > 0.7 { 0.7 / total } else { 1.0 };
    let radial_bump = rng.range(-0.25, 0.25);
    grid.field(|r, t| {
        let mut v = 1.0 + radial_bump * (r * r - 0.5);
        for &(l, a, phase, decay) in &modes {
            v += scale * a * (l as f64 * t + phase).cos() * r.powf(decay);
        }
        amp * v.max(0.0)
    })
}

/// Nonnegative boundary field with the same construction.
pub fn random_circle_field(grid: DiskGrid, rng: &mut SplitMix64, amp: f64) -> CircleField {
    let n_modes = 2 + (rng.next_u64() % (MAX_MODE as u64 - 1)) as usize;
    let modes: Vec<(usize, f64, f64)> = (0..n_modes)
        .map(|_| {
            let l = 1 + (rng.next_u64() % MAX_MODE as u64) as usize;
            let a = rng.range(-1.0, 1.0);
            let phase = rng.range(0.0, std::f64::consts::TAU);
            (l, a, phase)
        })
        .collect();
    let total: f64 = modes.iter().map(|(_, a, _)| a.abs()).sum();
    let scale = if total > 0.9 { 0.9 / total } else { 1.0 };
    grid.circle(|t| {
        let mut v = 1.0;
        for &(l, a, phase) in &modes {
            v += scale * a * (l as f64 * t + phase).cos();
        }
        amp * v.max(0.0)
    })
}

/// L² distance from `f` to the nearest grid rotation of its cap
/// symmetrization. Rotations are the rigidity class of the Talenti
/// equality case, so this is the right asymmetry measure for margin
/// checks.
pub fn asymmetry_distance(grid: DiskGrid, f: &PolarField, f_sym: &PolarField) -> f64 {
    let m = grid.m;
    let w = grid.dr() * grid.dtheta();
    let mut best = f64::INFINITY;
    for shift in 0..m {
        let mut s = 0.0;
        for (i, ((_, a), (_, b))) in f.rings.iter().zip(&f_sym.rings).enumerate() {
            let rw = grid.radius(i) * w;
            for j in 0..m {
                let d = a.values[(j + shift) % m] - b.values[j];
                s += d * d * rw;
            }
        }
        best = best.min(s);
    }
    best.sqrt()
}
