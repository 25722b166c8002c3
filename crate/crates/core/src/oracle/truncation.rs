//! Truncated Q-functions: weighted averages of the exact Q over the
//! coordinates outside a κ-hop neighborhood.

use crate::error::{Error, Result};

use super::space::LocalPairSpace;
use super::ExactOracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TruncationWeights {
    /// `w = pi(z_out | z_in)`, the conditional stationary distribution.
    ConditionalStationary,
    /// Equal weight on every outside assignment.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct TruncatedQ {
    pub agent: usize,
    pub kappa: usize,
    pub local: LocalPairSpace,
    pub values: Vec<f64>,
}

impl TruncatedQ {
    /// Value at the projection of a global joint index.
    pub fn at(&self, oracle: &ExactOracle, z: usize) -> f64 {
        self.values[self.local.project(oracle.space(), z)]
    }
}

pub(super) fn truncated_q(
    oracle: &ExactOracle,
    i: usize,
    kappa: usize,
    weights: TruncationWeights,
    q: &[f64],
) -> Result<TruncatedQ> {
    let members = oracle.mdp().graph().kappa_neighborhood(i, kappa)?;
    let space = oracle.space();
    let local = LocalPairSpace::new(space, &members);
    let m = local.size();
    let mut acc = vec![0.0; m];
    match weights {
        TruncationWeights::ConditionalStationary => {
            let mut marginal = vec![0.0; m];
            for (z, &p) in oracle.stationary().iter().enumerate() {
                let u = local.project(space, z);
                marginal[u] += p;
                acc[u] += p * q[z];
            }
            for (u, (a, &w)) in acc.iter_mut().zip(&marginal).enumerate() {
                if w <= 0.0 {
                    return Err(Error::UnreachableLocalPair { agent: i, pair: u });
                }
                *a /= w;
            }
        }
        TruncationWeights::Uniform => {
            let count = (space.size() / m) as f64;
            for (z, &qz) in q.iter().enumerate() {
                acc[local.project(space, z)] += qz;
            }
            for a in acc.iter_mut() {
                *a /= count;
            }
        }
    }
    Ok(TruncatedQ {
        agent: i,
        kappa,
        local,
        values: acc,
    })
}
