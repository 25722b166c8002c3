//! The interaction matrix: worst-case total-variation influence of each
//! neighbor's state (and the agent's own state-action) on an agent's
//! next-state distribution.

use crate::error::{Error, Result};
use crate::index::MixedRadixIndex;
use crate::mdp::FactoredMdp;

use super::OracleOptions;

/// `C[i][j]` entries with row sums and the bound `rho = max_i sum_j C_ij`.
#[derive(Debug, Clone)]
pub struct InteractionMatrix {
    pub n: usize,
    pub c: Vec<f64>, // row-major n x n
    pub row_sums: Vec<f64>,
    pub rho_bound: f64,
}

impl InteractionMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.c[i * self.n + j]
    }

    /// Whether the row-sum condition for exponential decay holds.
    pub fn passes_condition(&self) -> bool {
        self.rho_bound < 1.0
    }
}

/// Total variation distance, computed as half the l1 distance.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>()
}

pub fn interaction_matrix(mdp: &FactoredMdp, opts: &OracleOptions) -> Result<InteractionMatrix> {
    let n = mdp.num_agents();
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        let nbrs = mdp.graph().neighbors(i);
        let kernel = mdp.kernel(i);
        let rows = kernel.row_count() as u128;
        if rows > opts.interaction_guard {
            return Err(Error::SizeGuard {
                size: rows,
                limit: opts.interaction_guard,
            });
        }
        let mut radices: Vec<usize> = nbrs.iter().map(|&j| mdp.space(j).state_count).collect();
        radices.push(mdp.space(i).action_count);
        let row_ix = MixedRadixIndex::new(radices);
        let own_pos = nbrs.iter().position(|&j| j == i).expect("self in N_i");
        let action_pos = nbrs.len();

        for (pos, &j) in nbrs.iter().enumerate() {
            let sup = if j == i {
                // diagonal: perturb own state and action jointly
                sup_tv_over_positions(kernel, &row_ix, &[own_pos, action_pos])
            } else {
                // off-diagonal: perturb neighbor j's state only
                sup_tv_over_positions(kernel, &row_ix, &[pos])
            };
            c[i * n + j] = sup;
        }
    }
    let row_sums: Vec<f64> = (0..n).map(|i| c[i * n..(i + 1) * n].iter().sum()).collect();
    let rho_bound = row_sums.iter().cloned().fold(0.0f64, f64::max);
    Ok(InteractionMatrix {
        n,
        c,
        row_sums,
        rho_bound,
    })
}

/// Sup of TV distance between kernel rows whose index tuples differ only in
/// the listed coordinates.
fn sup_tv_over_positions(
    kernel: &crate::mdp::LocalKernel,
    row_ix: &MixedRadixIndex,
    positions: &[usize],
) -> f64 {
    let rows = row_ix.len();
    let mut sup: f64 = 0.0;
    // enumerate each row against every reassignment of the varied positions
    let varied_dims: Vec<usize> = positions.iter().map(|&p| row_ix.radices()[p]).collect();
    let varied_total: usize = varied_dims.iter().product();
    for r1 in 0..rows {
        let tuple = row_ix.decode(r1);
        for flat in 0..varied_total {
            let mut t2 = tuple.clone();
            let mut rem = flat;
            for (k, &p) in positions.iter().enumerate() {
                t2[p] = rem % varied_dims[k];
                rem /= varied_dims[k];
            }
            let r2 = row_ix.encode(&t2).expect("in range");
            if r2 <= r1 {
                continue;
            }
            let tv = tv_distance(kernel.row(r1), kernel.row(r2));
            if tv > sup {
                sup = tv;
            }
        }
    }
    sup
}
