//! Poisson and discounted linear solves against the induced chain.

use crate::error::{Error, Result};

use super::chain::InducedChain;
use super::linalg::solve_dense;

const RESIDUAL_TOL: f64 = 1e-10;

/// Solve `(I - P) q = d` with `pi^T q = 0`, where `pi^T d = 0`.
///
/// Dense path: solve `(I - P + 1 pi^T) q = d`, whose unique solution is the
/// zero-mean representative. Factored path: sum the series
/// `q = sum_t P^t d`, which converges at the chain's mixing rate.
pub fn poisson_solve(chain: &InducedChain, pi: &[f64], d: &[f64]) -> Result<Vec<f64>> {
    let n = chain.size();
    let mut q = if let Some(p) = chain.dense() {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = -p[i * n + j] + pi[j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        let mut b = d.to_vec();
        solve_dense(&mut a, &mut b)
            .map_err(|_| Error::Singular("Poisson system singular beyond normalization".into()))?
    } else {
        series_sum(chain, d)?
    };
    // pin the stationary mean to zero exactly
    let mean: f64 = q.iter().zip(pi).map(|(a, b)| a * b).sum();
    for x in q.iter_mut() {
        *x -= mean;
    }
    let pq = chain.apply_values(&q);
    let worst = (0..n)
        .map(|z| (q[z] - d[z] - pq[z]).abs())
        .fold(0.0f64, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::NonConverged(format!(
            "Poisson residual {worst:.3e} above {RESIDUAL_TOL:.0e}"
        )));
    }
    Ok(q)
}

fn series_sum(chain: &InducedChain, d: &[f64]) -> Result<Vec<f64>> {
    let mut acc = d.to_vec();
    let mut v = d.to_vec();
    let mut prev_norm = inf_norm(&v);
    let scale = prev_norm.max(1e-30);
    for _ in 0..100_000 {
        v = chain.apply_values(&v);
        for (a, b) in acc.iter_mut().zip(&v) {
            *a += b;
        }
        let norm = inf_norm(&v);
        // geometric tail estimate
        let rate = (norm / prev_norm.max(1e-300)).min(0.999_999);
        if norm * rate / (1.0 - rate) < 1e-12 * scale.max(1.0) || norm < 1e-16 * scale {
            return Ok(acc);
        }
        prev_norm = norm;
    }
    Err(Error::NonConverged(
        "Q-function series did not converge".into(),
    ))
}

/// Solve `q = r + gamma P q`.
pub fn discounted_solve(chain: &InducedChain, r: &[f64], gamma: f64) -> Result<Vec<f64>> {
    let n = chain.size();
    let q = if let Some(p) = chain.dense() {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                a[i * n + j] = -gamma * p[i * n + j] + if i == j { 1.0 } else { 0.0 };
            }
        }
        let mut b = r.to_vec();
        solve_dense(&mut a, &mut b)?
    } else {
        // geometric series, contraction factor gamma
        let mut acc = r.to_vec();
        let mut v = r.to_vec();
        let scale = inf_norm(r).max(1.0);
        let mut converged = false;
        for _ in 0..100_000 {
            v = chain.apply_values(&v);
            for x in v.iter_mut() {
                *x *= gamma;
            }
            for (a, b) in acc.iter_mut().zip(&v) {
                *a += b;
            }
            if inf_norm(&v) * gamma / (1.0 - gamma) < 1e-12 * scale {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConverged(
                "discounted series did not converge".into(),
            ));
        }
        acc
    };
    let pq = chain.apply_values(&q);
    let worst = (0..n)
        .map(|z| (q[z] - r[z] - gamma * pq[z]).abs())
        .fold(0.0f64, f64::max);
    if worst > RESIDUAL_TOL {
        return Err(Error::NonConverged(format!(
            "discounted residual {worst:.3e} above {RESIDUAL_TOL:.0e}"
        )));
    }
    Ok(q)
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, &x| m.max(x.abs()))
}
