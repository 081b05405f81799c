//! Dense reference implementations used as independent oracles. These stay
//! deliberately naive (Gaussian elimination, Jacobi rotations, Sturm
//! bisection) so they share no code path with the solvers they check.
#![allow(dead_code)] // each test binary uses its own subset

use bulksurf_core::linalg::SparseSym;

pub fn densify(a: &SparseSym) -> Vec<Vec<f64>> {
    let n = a.n();
    let mut dense = vec![vec![0.0; n]; n];
    for &(i, j, v) in a.entries() {
        dense[i as usize][j as usize] += v;
        if i != j {
            dense[j as usize][i as usize] += v;
        }
    }
    dense
}

/// Gaussian elimination with partial pivoting.
pub fn dense_solve(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    let mut x = b.to_vec();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[i][col].abs().partial_cmp(&m[j][col].abs()).unwrap())
            .unwrap();
        m.swap(col, pivot);
        x.swap(col, pivot);
        let p = m[col][col];
        assert!(p.abs() > 1e-300, "singular oracle system");
        for row in col + 1..n {
            let f = m[row][col] / p;
            if f != 0.0 {
                for k in col..n {
                    m[row][k] -= f * m[col][k];
                }
                x[row] -= f * x[col];
            }
        }
    }
    for col in (0..n).rev() {
        x[col] /= m[col][col];
        for row in 0..col {
            x[row] -= m[row][col] * x[col];
        }
    }
    x
}

/// All eigenvalues of a dense symmetric matrix by cyclic Jacobi rotations.
pub fn dense_sym_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let mut m: Vec<Vec<f64>> = a.iter().cloned().collect();
    for _sweep in 0..100 {
        let mut off = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                off += m[i][j] * m[i][j];
            }
        }
        if off.sqrt() < 1e-13 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if m[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[q][q] - m[p][p]) / (2.0 * m[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (mkp, mkq) = (m[k][p], m[k][q]);
                    m[k][p] = c * mkp - s * mkq;
                    m[k][q] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let (mpk, mqk) = (m[p][k], m[q][k]);
                    m[p][k] = c * mpk - s * mqk;
                    m[q][k] = s * mpk + c * mqk;
                }
            }
        }
    }
    let mut evs: Vec<f64> = (0..n).map(|i| m[i][i]).collect();
    evs.sort_by(f64::total_cmp);
    evs
}

/// Dense Cholesky factor (lower) of an SPD matrix.
pub fn dense_cholesky(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut l = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[i][j];
            for k in 0..j {
                s -= l[i][k] * l[j][k];
            }
            if i == j {
                assert!(s > 0.0, "oracle matrix not SPD");
                l[i][j] = s.sqrt();
            } else {
                l[i][j] = s / l[j][j];
            }
        }
    }
    l
}

/// Eigenvalues of the symmetric pencil (A, M) through the dense Cholesky
/// reduction M = L Lᵀ, C = L⁻¹ A L⁻ᵀ.
pub fn dense_generalized_eigenvalues(a: &[Vec<f64>], m: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let l = dense_cholesky(m);
    // W = L^{-1} A  (forward substitution column by column)
    let mut w = vec![vec![0.0; n]; n];
    for col in 0..n {
        for i in 0..n {
            let mut s = a[i][col];
            for k in 0..i {
                s -= l[i][k] * w[k][col];
            }
            w[i][col] = s / l[i][i];
        }
    }
    // C = W L^{-T}: solve C Lᵀ = W row by row
    let mut c = vec![vec![0.0; n]; n];
    for row in 0..n {
        for j in 0..n {
            let mut s = w[row][j];
            for k in 0..j {
                s -= c[row][k] * l[j][k];
            }
            c[row][j] = s / l[j][j];
        }
    }
    dense_sym_eigenvalues(&c)
}
