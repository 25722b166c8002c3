//! Fixed point of the frozen-policy critic recursion, by direct linear
//! solve of the projected equations.

use crate::error::{Error, Result};

use super::linalg::solve_dense;
use super::space::LocalPairSpace;
use super::ExactOracle;

#[derive(Debug, Clone)]
pub struct CriticFixedPoint {
    pub agent: usize,
    pub kappa: usize,
    /// Solves to the agent's stationary average reward.
    pub mu: f64,
    /// Over the full local pair space; the dummy coordinate is exactly 0.
    pub qhat: Vec<f64>,
    pub dummy_pair: usize,
    pub local: LocalPairSpace,
}

impl CriticFixedPoint {
    pub fn at(&self, oracle: &ExactOracle, z: usize) -> f64 {
        self.qhat[self.local.project(oracle.space(), z)]
    }
}

/// Solve the coupled system
///
/// ```text
/// mu                                        = pi^T r_i
/// Phi^T D [r_i - mu 1 + P Phi qhat] - Phi^T D Phi qhat = 0
/// ```
///
/// with the dummy coordinate of `qhat` pinned to 0 (`Phi` is the truncation
/// incidence matrix without the dummy column). Needs the dense chain.
pub(super) fn critic_fixed_point(
    oracle: &ExactOracle,
    i: usize,
    kappa: usize,
    dummy_pair: usize,
) -> Result<CriticFixedPoint> {
    let space = oracle.space();
    let p = oracle.chain().dense().ok_or(Error::SizeGuard {
        size: space.size() as u128,
        limit: 0,
    })?;
    let members = oracle.mdp().graph().kappa_neighborhood(i, kappa)?;
    let local = LocalPairSpace::new(space, &members);
    let m = local.size();
    if dummy_pair >= m {
        return Err(Error::IndexRange(format!(
            "dummy pair {dummy_pair} outside local space of size {m}"
        )));
    }
    let pi = oracle.stationary();
    let r = oracle.reward_vector(i);
    let size = space.size();

    // unknowns: x = [mu, qhat without the dummy coordinate]
    let dim = m; // 1 + (m - 1)
    let col_of = |u: usize| -> Option<usize> {
        match u.cmp(&dummy_pair) {
            std::cmp::Ordering::Less => Some(1 + u),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(u),
        }
    };
    let mut a = vec![0.0; dim * dim];
    let mut b = vec![0.0; dim];
    // row 0: mu = pi^T r_i
    a[0] = 1.0;
    b[0] = pi.iter().zip(&r).map(|(p, r)| p * r).sum();
    // remaining rows, one per non-dummy local pair u, rearranged to
    //   sum_{z: proj z = u} pi(z) [ mu + qhat(u)
    //       - sum_{z'} P(z,z') qhat(proj z') ] = sum_{z: proj z = u} pi(z) r(z)
    let projections: Vec<usize> = (0..size).map(|z| local.project(space, z)).collect();
    for z in 0..size {
        let u = projections[z];
        let Some(row) = col_of(u) else { continue };
        let w = pi[z];
        if w == 0.0 {
            continue;
        }
        b[row] += w * r[z];
        a[row * dim] += w; // mu column
        a[row * dim + row] += w; // qhat(u) column (col_of(u) == row)
        for z2 in 0..size {
            let pz = p[z * size + z2];
            if pz == 0.0 {
                continue;
            }
            if let Some(c2) = col_of(projections[z2]) {
                a[row * dim + c2] -= w * pz;
            }
        }
    }

    let x = solve_dense(&mut a.clone(), &mut b.clone()).map_err(|_| {
        Error::Singular(
            "critic fixed-point system singular; stationary mass missing on some local pair".into(),
        )
    })?;

    // residual check on the original system
    let mut worst: f64 = 0.0;
    for row in 0..dim {
        let mut acc = 0.0;
        for c in 0..dim {
            acc += a[row * dim + c] * x[c];
        }
        worst = worst.max((acc - b[row]).abs());
    }
    if worst > 1e-10 {
        return Err(Error::NonConverged(format!(
            "critic fixed-point residual {worst:.3e}"
        )));
    }

    let mut qhat = vec![0.0; m];
    for u in 0..m {
        if let Some(c) = col_of(u) {
            qhat[u] = x[c];
        }
    }
    Ok(CriticFixedPoint {
        agent: i,
        kappa,
        mu: x[0],
        qhat,
        dummy_pair,
        local,
    })
}
