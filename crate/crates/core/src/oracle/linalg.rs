//! Small dense linear algebra: LU solves and a symmetric Jacobi
//! eigensolver. Sizes here are bounded by the oracle's dense limit, so
//! plain O(n^3) routines are enough.

use crate::error::{Error, Result};

/// Solve `A x = b` in place via LU with partial pivoting. `a` is row-major
/// `n x n` and is destroyed.
pub fn solve_dense(a: &mut [f64], b: &mut [f64]) -> Result<Vec<f64>> {
    let n = b.len();
    assert_eq!(a.len(), n * n);
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        // pivot
        let mut pivot = col;
        let mut best = a[perm[col] * n + col].abs();
        for row in col + 1..n {
            let v = a[perm[row] * n + col].abs();
            if v > best {
                best = v;
                pivot = row;
            }
        }
        if best < 1e-300 {
            return Err(Error::Singular(format!("pivot {best:.3e} at column {col}")));
        }
        perm.swap(col, pivot);
        let prow = perm[col];
        let inv = 1.0 / a[prow * n + col];
        for row in col + 1..n {
            let r = perm[row];
            let factor = a[r * n + col] * inv;
            if factor != 0.0 {
                a[r * n + col] = factor;
                for k in col + 1..n {
                    a[r * n + k] -= factor * a[prow * n + k];
                }
            } else {
                a[r * n + col] = 0.0;
            }
        }
    }
    // forward substitution on permuted b
    let mut y = vec![0.0; n];
    for row in 0..n {
        let r = perm[row];
        let mut acc = b[r];
        for k in 0..row {
            acc -= a[r * n + k] * y[k];
        }
        y[row] = acc;
    }
    // back substitution
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let r = perm[row];
        let mut acc = y[row];
        for k in row + 1..n {
            acc -= a[r * n + k] * x[k];
        }
        x[row] = acc / a[r * n + row];
    }
    Ok(x)
}

/// Largest eigenvalue of a symmetric matrix via cyclic Jacobi rotations.
pub fn symmetric_max_eigenvalue(mut a: Vec<f64>, n: usize) -> f64 {
    assert_eq!(a.len(), n * n);
    if n == 1 {
        return a[0];
    }
    for _sweep in 0..100 {
        let mut off = 0.0;
        for p in 0..n {
            for q in p + 1..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let tau = (aqq - app) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + (1.0 + tau * tau).sqrt())
                } else {
                    -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n)
        .map(|k| a[k * n + k])
        .fold(f64::NEG_INFINITY, f64::max)
}
