//! Exact and truncated-approximation policy gradients, as full
//! expectations over the stationary distribution.

use crate::error::Result;

use super::truncation::TruncationWeights;
use super::ExactOracle;

/// `grad_i J = E_pi [ Qbar(z) * grad_theta_i log zeta_i(a_i|s_i) ]` with
/// `Qbar = (1/n) sum_j Q_j`.
pub(super) fn exact_policy_gradient(oracle: &ExactOracle) -> Result<Vec<Vec<f64>>> {
    let n = oracle.mdp().num_agents();
    let all_q = oracle.all_q()?;
    let size = oracle.space().size();
    let mut qbar = vec![0.0; size];
    for q in &all_q {
        for (acc, &x) in qbar.iter_mut().zip(q) {
            *acc += x;
        }
    }
    for x in qbar.iter_mut() {
        *x /= n as f64;
    }
    Ok(accumulate_gradient(oracle, |_i, z| qbar[z]))
}

/// `h_i = E_pi [ (1/n) sum_{j in N_i^kappa} Qtilde_j(z_{N_j^kappa})
///              * grad_theta_i log zeta_i(a_i|s_i) ]`.
pub(super) fn approx_policy_gradient(
    oracle: &ExactOracle,
    kappa: usize,
    weights: TruncationWeights,
) -> Result<Vec<Vec<f64>>> {
    let n = oracle.mdp().num_agents();
    let truncated: Vec<_> = (0..n)
        .map(|j| oracle.truncated_q(j, kappa, weights))
        .collect::<Result<_>>()?;
    let size = oracle.space().size();
    // per-agent neighborhood sums, precomputed over z
    let mut sums = vec![vec![0.0; size]; n];
    for i in 0..n {
        let members = oracle.mdp().graph().kappa_neighborhood(i, kappa)?;
        for z in 0..size {
            let mut acc = 0.0;
            for &j in &members {
                acc += truncated[j].at(oracle, z);
            }
            sums[i][z] = acc / n as f64;
        }
    }
    Ok(accumulate_gradient(oracle, |i, z| sums[i][z]))
}

/// Shared expectation loop: weight(z) times the score-function row.
fn accumulate_gradient<F: Fn(usize, usize) -> f64>(
    oracle: &ExactOracle,
    weight: F,
) -> Vec<Vec<f64>> {
    let n = oracle.mdp().num_agents();
    let space = oracle.space();
    let policy = oracle.policy();
    let dists: Vec<Vec<Vec<f64>>> = (0..n)
        .map(|i| {
            (0..oracle.mdp().space(i).state_count)
                .map(|s| policy.action_distribution(i, s))
                .collect()
        })
        .collect();
    let mut grads: Vec<Vec<f64>> = (0..n).map(|i| vec![0.0; policy.theta(i).len()]).collect();
    for (z, &p) in oracle.stationary().iter().enumerate() {
        for i in 0..n {
            let (s, a) = space.state_action(z, i);
            let actions = oracle.mdp().space(i).action_count;
            let w = p * weight(i, z);
            if w == 0.0 {
                continue;
            }
            let row = &mut grads[i][s * actions..(s + 1) * actions];
            let dist = &dists[i][s];
            for (b, slot) in row.iter_mut().enumerate() {
                let indicator = if b == a { 1.0 } else { 0.0 };
                *slot += w * (indicator - dist[b]);
            }
        }
    }
    grads
}

pub fn gradient_norm(grads: &[Vec<f64>]) -> f64 {
    grads
        .iter()
        .flat_map(|g| g.iter())
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt()
}
