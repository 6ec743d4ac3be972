//! Small dense linear algebra over either scalar backend.

use crate::scalar::Scalar;

/// Solves `a x = b` by Gaussian elimination. Returns `None` when the matrix
/// is singular (exactly, or below `1e-12` relative pivot size for floats).
pub fn solve<S: Scalar>(a: &[Vec<S>], b: &[S]) -> Option<Vec<S>> {
    let n = b.len();
    debug_assert!(a.len() == n && a.iter().all(|r| r.len() == n));
    let mut m: Vec<Vec<S>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let scale = a
        .iter()
        .flatten()
        .map(|v| v.to_f64().abs())
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    for col in 0..n {
        let pivot =
            if S::EXACT {
                (col..n).find(|&r| !m[r][col].is_zero())?
            } else {
                let (r, best) = (col..n).map(|r| (r, m[r][col].to_f64().abs())).fold(
                    (col, -1.0),
                    |acc, cur| if cur.1 > acc.1 { cur } else { acc },
                );
                if best <= 1e-12 * scale {
                    return None;
                }
                r
            };
        m.swap(col, pivot);
        let p = m[col][col].clone();
        for r in 0..n {
            if r == col || m[r][col].is_zero() {
                continue;
            }
            let factor = m[r][col].clone() / p.clone();
            for c in col..=n {
                let delta = factor.clone() * m[col][c].clone();
                m[r][c] = m[r][c].clone() - delta;
            }
        }
    }
    Some((0..n).map(|i| m[i][n].clone() / m[i][i].clone()).collect())
}

/// Minimum eigenvalue of the symmetric part `(A + Aᵀ)/2`.
pub fn min_symmetric_eigenvalue(a: &[Vec<f64>]) -> f64 {
    let n = a.len();
    let m = nalgebra::DMatrix::from_fn(n, n, |i, j| 0.5 * (a[i][j] + a[j][i]));
    m.symmetric_eigenvalues()
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min)
}
