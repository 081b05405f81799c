//! Sparse symmetric linear algebra shared by the solvers.
//!
//! Everything here operates on [`SparseSym`], a triplet-based symmetric
//! matrix storing one entry per unordered index pair. Linear solves go
//! through a banded LDLᵀ factorization after reverse Cuthill-McKee
//! reordering; a Jacobi-preconditioned conjugate gradient takes over when
//! the band would be too wide to store. The smallest eigenvalue of a pencil
//! `(A, M)` is computed by shift-invert inverse iteration.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix not positive definite (pivot {pivot:.3e} at index {index})")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("shift {shift} is not below the pencil spectrum")]
    ShiftNotBelowSpectrum { shift: f64 },
}

/// Symmetric sparse matrix, entries stored once per unordered pair with
/// `row <= col`. Duplicates are merged on construction.
#[derive(Debug, Clone)]
pub struct SparseSym {
    n: usize,
    entries: Vec<(u32, u32, f64)>,
}

impl SparseSym {
    /// Builds from raw triplets; `(i, j, v)` and `(j, i, v)` address the
    /// same entry and duplicates accumulate.
    pub fn from_triplets(
        n: usize,
        triplets: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Self {
        assert!(n >= 1, "matrix dimension must be >= 1");
        let mut entries: Vec<(u32, u32, f64)> = triplets
            .into_iter()
            .map(|(i, j, v)| {
                assert!(i < n && j < n, "triplet index out of range");
                let (a, b) = if i <= j { (i, j) } else { (j, i) };
                (a as u32, b as u32, v)
            })
            .collect();
        entries.sort_by_key(|&(i, j, _)| (i, j));
        entries.dedup_by(|next, acc| {
            if acc.0 == next.0 && acc.1 == next.1 {
                acc.2 += next.2;
                true
            } else {
                false
            }
        });
        entries.retain(|&(i, j, v)| i == j || v != 0.0);
        SparseSym { n, entries }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, (0..n).map(|i| (i, i, 1.0)))
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        Self::from_triplets(diag.len(), diag.iter().enumerate().map(|(i, &v)| (i, i, v)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn entries(&self) -> &[(u32, u32, f64)] {
        &self.entries
    }

    /// y = A x, expanding the symmetric storage.
    pub fn mul_vec(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.n);
        assert_eq!(y.len(), self.n);
        y.fill(0.0);
        for &(i, j, v) in &self.entries {
            let (i, j) = (i as usize, j as usize);
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
    }

    /// xᵀ A x.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), self.n);
        let mut q = 0.0;
        for &(i, j, v) in &self.entries {
            let (i, j) = (i as usize, j as usize);
            q += if i == j {
                v * x[i] * x[i]
            } else {
                2.0 * v * x[i] * x[j]
            };
        }
        q
    }

    /// A + s * B (matching dimensions).
    pub fn add_scaled(&self, other: &SparseSym, s: f64) -> Result<SparseSym, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "add_scaled: {} vs {}",
                self.n, other.n
            )));
        }
        let trips = self
            .entries
            .iter()
            .map(|&(i, j, v)| (i as usize, j as usize, v))
            .chain(
                other
                    .entries
                    .iter()
                    .map(|&(i, j, v)| (i as usize, j as usize, s * v)),
            );
        Ok(SparseSym::from_triplets(self.n, trips))
    }

    fn adjacency(&self) -> Vec<Vec<u32>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j, _) in &self.entries {
            if i != j {
                adj[i as usize].push(j);
                adj[j as usize].push(i);
            }
        }
        for list in &mut adj {
            list.sort_unstable();
            list.dedup();
        }
        adj
    }
}

/// Reverse Cuthill-McKee ordering; returns `perm` with `perm[new] = old`.
pub fn rcm_order(a: &SparseSym) -> Vec<usize> {
    let n = a.n();
    let adj = a.adjacency();
    let degree: Vec<usize> = adj.iter().map(|l| l.len()).collect();
    let mut visited = vec![false; n];
    let mut order = Vec::with_capacity(n);
    let mut queue = std::collections::VecDeque::new();

    // Process components from lowest-degree unvisited seeds.
    let mut seeds: Vec<usize> = (0..n).collect();
    seeds.sort_by_key(|&i| degree[i]);
    for &seed in &seeds {
        if visited[seed] {
            continue;
        }
        visited[seed] = true;
        queue.push_back(seed);
        while let Some(v) = queue.pop_front() {
            order.push(v);
            let mut nbrs: Vec<u32> = adj[v]
                .iter()
                .copied()
                .filter(|&w| !visited[w as usize])
                .collect();
            nbrs.sort_by_key(|&w| degree[w as usize]);
            for w in nbrs {
                visited[w as usize] = true;
                queue.push_back(w as usize);
            }
        }
    }
    order.reverse();
    order
}

/// Lower-banded storage after symmetric permutation, factored in place as LDLᵀ.
struct BandedLdlt {
    n: usize,
    bw: usize,
    /// column-major band: entry (i, j) with j <= i <= j + bw at data[j * (bw + 1) + (i - j)]
    data: Vec<f64>,
    perm: Vec<usize>,
}

impl BandedLdlt {
    fn bandwidth(a: &SparseSym, inv_perm: &[usize]) -> usize {
        a.entries()
            .iter()
            .map(|&(i, j, _)| inv_perm[i as usize].abs_diff(inv_perm[j as usize]))
            .max()
            .unwrap_or(0)
    }

    /// Factor `a` with the given ordering. `require_spd` rejects non-positive
    /// pivots; otherwise only near-zero pivots are rejected.
    fn factor(a: &SparseSym, perm: Vec<usize>, require_spd: bool) -> Result<Self, LinalgError> {
        let n = a.n();
        let mut inv_perm = vec![0usize; n];
        for (new, &old) in perm.iter().enumerate() {
            inv_perm[old] = new;
        }
        let bw = Self::bandwidth(a, &inv_perm);
        let mut data = vec![0.0; n * (bw + 1)];
        for &(i, j, v) in a.entries() {
            let (pi, pj) = (inv_perm[i as usize], inv_perm[j as usize]);
            let (lo, hi) = if pi <= pj { (pi, pj) } else { (pj, pi) };
            data[lo * (bw + 1) + (hi - lo)] += v;
        }

        // In-place LDLᵀ: D on the sub-diagonal offset 0, L below.
        let stride = bw + 1;
        for j in 0..n {
            let k0 = j.saturating_sub(bw);
            let mut d = data[j * stride];
            for k in k0..j {
                let l_jk = data[k * stride + (j - k)];
                d -= l_jk * l_jk * data[k * stride];
            }
            if (require_spd && d <= 0.0) || d.abs() < 1e-300 {
                return Err(LinalgError::NotPositiveDefinite {
                    index: perm[j],
                    pivot: d,
                });
            }
            data[j * stride] = d;
            let imax = (j + bw).min(n - 1);
            for i in (j + 1)..=imax {
                let mut s = data[j * stride + (i - j)];
                let k1 = i.saturating_sub(bw).max(k0);
                for k in k1..j {
                    s -= data[k * stride + (i - k)] * data[k * stride + (j - k)] * data[k * stride];
                }
                data[j * stride + (i - j)] = s / d;
            }
        }
        Ok(BandedLdlt { n, bw, data, perm })
    }

    fn solve(&self, b: &[f64], x: &mut [f64]) {
        let stride = self.bw + 1;
        let n = self.n;
        let mut y = vec![0.0; n];
        for i in 0..n {
            y[i] = b[self.perm[i]];
        }
        // forward: L y = b
        for j in 0..n {
            let yj = y[j];
            if yj != 0.0 {
                let imax = (j + self.bw).min(n - 1);
                for i in (j + 1)..=imax {
                    y[i] -= self.data[j * stride + (i - j)] * yj;
                }
            }
        }
        // diagonal
        for j in 0..n {
            y[j] /= self.data[j * stride];
        }
        // backward: Lᵀ x = y
        for j in (0..n).rev() {
            let imax = (j + self.bw).min(n - 1);
            let mut s = y[j];
            for i in (j + 1)..=imax {
                s -= self.data[j * stride + (i - j)] * y[i];
            }
            y[j] = s;
        }
        for i in 0..n {
            x[self.perm[i]] = y[i];
        }
    }
}

/// Options shared by the direct solver and the eigensolver. Tolerances are
/// fields rather than constants so acceptance tests can tighten them.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Relative residual target for linear solves.
    pub rtol: f64,
    /// Relative residual target for eigenpairs.
    pub eig_tol: f64,
    /// Band storage budget (in f64 slots) above which CG takes over.
    pub band_budget: usize,
    pub max_cg_iters: usize,
    pub max_eig_iters: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            rtol: 1e-10,
            eig_tol: 1e-9,
            band_budget: 200_000_000,
            max_cg_iters: 50_000,
            max_eig_iters: 400,
        }
    }
}

fn norm2(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Solves A x = b for symmetric positive definite A.
pub fn solve_spd(a: &SparseSym, b: &[f64], opts: &SolveOptions) -> Result<Vec<f64>, LinalgError> {
    if b.len() != a.n() {
        return Err(LinalgError::DimensionMismatch(format!(
            "solve_spd: matrix {} vs rhs {}",
            a.n(),
            b.len()
        )));
    }
    let perm = rcm_order(a);
    let mut inv = vec![0usize; a.n()];
    for (new, &old) in perm.iter().enumerate() {
        inv[old] = new;
    }
    let bw = BandedLdlt::bandwidth(a, &inv);
    if a.n() * (bw + 1) <= opts.band_budget {
        let fact = BandedLdlt::factor(a, perm, true)?;
        let mut x = vec![0.0; a.n()];
        fact.solve(b, &mut x);
        // iterative refinement down to rtol
        let mut r = vec![0.0; a.n()];
        for _ in 0..4 {
            a.mul_vec(&x, &mut r);
            for i in 0..a.n() {
                r[i] = b[i] - r[i];
            }
            let nb = norm2(b).max(f64::MIN_POSITIVE);
            if norm2(&r) <= opts.rtol * nb {
                break;
            }
            let mut dx = vec![0.0; a.n()];
            fact.solve(&r, &mut dx);
            for i in 0..a.n() {
                x[i] += dx[i];
            }
        }
        Ok(x)
    } else {
        cg_solve(a, b, opts)
    }
}

fn cg_solve(a: &SparseSym, b: &[f64], opts: &SolveOptions) -> Result<Vec<f64>, LinalgError> {
    let n = a.n();
    let mut diag = vec![0.0; n];
    for &(i, j, v) in a.entries() {
        if i == j {
            diag[i as usize] = v;
        }
    }
    for (idx, &d) in diag.iter().enumerate() {
        if d <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite {
                index: idx,
                pivot: d,
            });
        }
    }
    let nb = norm2(b).max(f64::MIN_POSITIVE);
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(ri, di)| ri / di).collect();
    let mut p = z.clone();
    let mut rz = dot(&r, &z);
    let mut ap = vec![0.0; n];
    for _ in 0..opts.max_cg_iters {
        if norm2(&r) <= opts.rtol * nb {
            return Ok(x);
        }
        a.mul_vec(&p, &mut ap);
        let pap = dot(&p, &ap);
        if pap <= 0.0 {
            return Err(LinalgError::NotPositiveDefinite {
                index: 0,
                pivot: pap,
            });
        }
        let alpha = rz / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    if norm2(&r) <= opts.rtol * nb {
        Ok(x)
    } else {
        Err(LinalgError::NotPositiveDefinite {
            index: 0,
            pivot: f64::NAN,
        })
    }
}

/// Eigenpair of the pencil `A x = value · M x`, unit M-norm coordinates.
#[derive(Debug, Clone)]
pub struct EigenPair {
    pub value: f64,
    pub coords: Vec<f64>,
}

/// Smallest eigenvalue of `A x = λ M x` by shift-invert inverse iteration.
///
/// `shift` must lie strictly below the pencil spectrum; this is detected
/// through the factorization of `A - shift M` (positive definite iff the
/// shift is below the smallest eigenvalue).
pub fn smallest_generalized_eigenpair(
    a: &SparseSym,
    m: &SparseSym,
    shift: f64,
    opts: &SolveOptions,
) -> Result<EigenPair, LinalgError> {
    if a.n() != m.n() {
        return Err(LinalgError::DimensionMismatch(format!(
            "pencil: {} vs {}",
            a.n(),
            m.n()
        )));
    }
    let n = a.n();
    let shifted = a.add_scaled(m, -shift)?;
    let perm = rcm_order(&shifted);
    let mut fact = match BandedLdlt::factor(&shifted, perm.clone(), true) {
        Ok(f) => f,
        Err(LinalgError::NotPositiveDefinite { .. }) => {
            return Err(LinalgError::ShiftNotBelowSpectrum { shift })
        }
        Err(e) => return Err(e),
    };

    let mut rng = crate::rng::SplitMix64::new(0x5eed_11a6);
    let mut x: Vec<f64> = (0..n)
        .map(|i| 1.0 + 1e-3 * rng.next_f64() + 1e-6 * i as f64)
        .collect();
    let mut mx = vec![0.0; n];
    let mut ax = vec![0.0; n];
    let mut y = vec![0.0; n];

    let m_normalize = |x: &mut Vec<f64>, m: &SparseSym, mx: &mut Vec<f64>| {
        m.mul_vec(x, mx);
        let nrm = dot(x, mx).sqrt();
        for v in x.iter_mut() {
            *v /= nrm;
        }
        for v in mx.iter_mut() {
            *v /= nrm;
        }
    };

    m_normalize(&mut x, m, &mut mx);
    let mut prev = x.clone();
    let mut stagnant = 0usize;
    let mut restarts = 0usize;
    let mut refined = false;
    for iter in 0..opts.max_eig_iters {
        fact.solve(&mx, &mut y);
        x.copy_from_slice(&y);
        m_normalize(&mut x, m, &mut mx);
        a.mul_vec(&x, &mut ax);
        let rho = dot(&x, &ax); // xᵀMx = 1
        let mut res = 0.0;
        for i in 0..n {
            let r = ax[i] - rho * mx[i];
            res += r * r;
        }
        let res = res.sqrt();
        let xnrm = norm2(&x);
        if res <= opts.eig_tol * xnrm {
            return Ok(EigenPair {
                value: rho,
                coords: x,
            });
        }
        // Clustered low end: the fixed shift converges at rate
        // (λ1-s)/(λ2-s) → refactor once near the Rayleigh estimate.
        if iter >= 30 && !refined {
            refined = true;
            let target = rho - (4.0 * res).max(1e-10 * (1.0 + rho.abs()));
            if let Ok(shifted2) = a.add_scaled(m, -target) {
                if let Ok(f2) = BandedLdlt::factor(&shifted2, perm.clone(), false) {
                    fact = f2;
                }
            }
        }
        // Flat iterate while the residual is still large means the start
        // vector fell into an invariant complement; re-seed with a random
        // vector deflated against the stalled direction.
        let sign = if dot(&x, &prev) < 0.0 { -1.0 } else { 1.0 };
        let drift = x
            .iter()
            .zip(&prev)
            .map(|(a, b)| (a - sign * b) * (a - sign * b))
            .sum::<f64>()
            .sqrt();
        if drift <= 1e-14 * xnrm {
            stagnant += 1;
            if stagnant >= 5 {
                restarts += 1;
                if restarts > 8 {
                    break;
                }
                let c_dir = x.clone();
                let mut xr: Vec<f64> = (0..n).map(|_| rng.next_f64() - 0.5).collect();
                let c = dot(&xr, &mx);
                for i in 0..n {
                    xr[i] -= c * c_dir[i];
                }
                x = xr;
                m_normalize(&mut x, m, &mut mx);
                stagnant = 0;
            }
        } else {
            stagnant = 0;
        }
        prev.copy_from_slice(&x);
    }
    Err(LinalgError::ShiftNotBelowSpectrum { shift })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_solve() {
        let a = SparseSym::identity(3);
        let x = solve_spd(&a, &[1.0, 2.0, 3.0], &SolveOptions::default()).unwrap();
        assert_eq!(x, vec![1.0, 2.0, 3.0]);
    }

    #[test]
    fn diagonal_solve() {
        let a = SparseSym::diagonal(&[2.0, 4.0]);
        let x = solve_spd(&a, &[2.0, 4.0], &SolveOptions::default()).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 1.0).abs() < 1e-14);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = SparseSym::identity(3);
        let err = solve_spd(&a, &[1.0, 2.0], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, LinalgError::DimensionMismatch(_)));
    }

    #[test]
    fn indefinite_matrix_rejected() {
        let a = SparseSym::from_triplets(2, [(0, 0, 1.0), (1, 1, -1.0)]);
        let err = solve_spd(&a, &[1.0, 1.0], &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, LinalgError::NotPositiveDefinite { .. }));
    }

    #[test]
    fn duplicate_triplets_accumulate() {
        let a = SparseSym::from_triplets(2, [(0, 1, 1.0), (1, 0, 1.0), (0, 0, 3.0), (1, 1, 3.0)]);
        // entry (0,1) must hold 2.0 exactly once
        assert_eq!(a.entries().len(), 3);
        let q = a.quadratic_form(&[1.0, 1.0]);
        assert!((q - 10.0).abs() < 1e-14);
    }

    #[test]
    fn trivial_pencil_eigenpair() {
        let a = SparseSym::diagonal(&[1.0, 2.0, 3.0]);
        let m = SparseSym::identity(3);
        let p = smallest_generalized_eigenpair(&a, &m, 0.0, &SolveOptions::default()).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9);
        assert!(p.coords[0].abs() > 0.999 && p.coords[1].abs() < 1e-4 && p.coords[2].abs() < 1e-4);
    }

    #[test]
    fn pencil_identity_a_equals_m() {
        let m = SparseSym::from_triplets(
            4,
            [
                (0, 0, 2.0),
                (1, 1, 2.5),
                (2, 2, 3.0),
                (3, 3, 1.5),
                (0, 1, 0.4),
                (2, 3, -0.2),
            ],
        );
        let p = smallest_generalized_eigenpair(&m, &m, 0.0, &SolveOptions::default()).unwrap();
        assert!((p.value - 1.0).abs() < 1e-9);
    }

    #[test]
    fn shift_above_spectrum_detected() {
        let a = SparseSym::diagonal(&[1.0, 2.0]);
        let m = SparseSym::identity(2);
        let err =
            smallest_generalized_eigenpair(&a, &m, 1.5, &SolveOptions::default()).unwrap_err();
        assert!(matches!(err, LinalgError::ShiftNotBelowSpectrum { .. }));
    }

    #[test]
    fn eigenpair_is_m_normalized_with_small_residual() {
        let a = SparseSym::from_triplets(
            5,
            (0..5)
                .map(|i| (i, i, 2.0 + i as f64))
                .chain((0..4).map(|i| (i, i + 1, -0.7))),
        );
        let m = SparseSym::diagonal(&[1.0, 1.3, 0.8, 1.1, 0.9]);
        let opts = SolveOptions::default();
        let p = smallest_generalized_eigenpair(&a, &m, -5.0, &opts).unwrap();
        let mut mx = vec![0.0; 5];
        m.mul_vec(&p.coords, &mut mx);
        assert!((dot(&p.coords, &mx) - 1.0).abs() < 1e-10);
        let mut ax = vec![0.0; 5];
        a.mul_vec(&p.coords, &mut ax);
        let res: f64 = ax
            .iter()
            .zip(&mx)
            .map(|(a, m)| (a - p.value * m) * (a - p.value * m))
            .sum::<f64>()
            .sqrt();
        assert!(res <= opts.eig_tol * norm2(&p.coords));
    }
}
