//! Tabular localized softmax policies.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::sample_categorical;

/// Per-agent policy parameters `θ_i`, one logit per local `(s_i, a_i)`.
/// Agent `i` draws its action from `softmax(θ_i[s_i, ·])`.
#[derive(Debug, Clone, PartialEq)]
pub struct SoftmaxPolicy {
    theta: Vec<Vec<f64>>, // per agent, flat [s * actions + a]
    state_counts: Vec<usize>,
    action_counts: Vec<usize>,
}

impl SoftmaxPolicy {
    /// Uniform policy: all logits zero.
    pub fn uniform(state_counts: &[usize], action_counts: &[usize]) -> Self {
        let theta = state_counts
            .iter()
            .zip(action_counts)
            .map(|(&s, &a)| vec![0.0; s * a])
            .collect();
        Self {
            theta,
            state_counts: state_counts.to_vec(),
            action_counts: action_counts.to_vec(),
        }
    }

    pub fn from_theta(
        theta: Vec<Vec<f64>>,
        state_counts: &[usize],
        action_counts: &[usize],
    ) -> Result<Self> {
        if theta.len() != state_counts.len() {
            return Err(Error::Dimension(format!(
                "theta has {} agents, expected {}",
                theta.len(),
                state_counts.len()
            )));
        }
        for (i, t) in theta.iter().enumerate() {
            if t.len() != state_counts[i] * action_counts[i] {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "theta has {} entries, expected {}",
                        t.len(),
                        state_counts[i] * action_counts[i]
                    ),
                });
            }
        }
        Ok(Self {
            theta,
            state_counts: state_counts.to_vec(),
            action_counts: action_counts.to_vec(),
        })
    }

    pub fn num_agents(&self) -> usize {
        self.theta.len()
    }

    pub fn state_counts(&self) -> &[usize] {
        &self.state_counts
    }

    pub fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    pub fn theta(&self, i: usize) -> &[f64] {
        &self.theta[i]
    }

    pub fn theta_entry(&self, i: usize, s: usize, a: usize) -> f64 {
        self.theta[i][s * self.action_counts[i] + a]
    }

    pub fn nudge_theta(&mut self, i: usize, s: usize, a: usize, delta: f64) {
        self.theta[i][s * self.action_counts[i] + a] += delta;
    }

    /// Add `delta` (length `|A_i|`) to the logits of row `s`.
    pub fn add_to_row(&mut self, i: usize, s: usize, delta: &[f64]) {
        let a = self.action_counts[i];
        for (t, d) in self.theta[i][s * a..(s + 1) * a].iter_mut().zip(delta) {
            *t += d;
        }
    }

    /// `ζ_i(· | s_i)`: softmax of row `s` of `θ_i`.
    pub fn action_distribution(&self, i: usize, s: usize) -> Vec<f64> {
        let a = self.action_counts[i];
        let row = &self.theta[i][s * a..(s + 1) * a];
        softmax(row)
    }

    pub fn action_prob(&self, i: usize, s: usize, a: usize) -> f64 {
        self.action_distribution(i, s)[a]
    }

    pub fn sample_action<R: Rng>(&self, i: usize, s: usize, rng: &mut R) -> usize {
        sample_categorical(&self.action_distribution(i, s), rng)
    }

    /// Nonzero row of `∇_{θ_i} log ζ_i(a | s)`: entry `b` is
    /// `1{b=a} - ζ_i(b|s)`. All other rows of the gradient are zero.
    pub fn grad_log_row(&self, i: usize, s: usize, a: usize) -> Vec<f64> {
        let mut row = self.action_distribution(i, s);
        for p in row.iter_mut() {
            *p = -*p;
        }
        row[a] += 1.0;
        row
    }

    /// Full gradient table of `log ζ_i(a|s)` with the shape of `θ_i`.
    pub fn grad_log(&self, i: usize, s: usize, a: usize) -> Vec<f64> {
        let actions = self.action_counts[i];
        let mut table = vec![0.0; self.theta[i].len()];
        let row = self.grad_log_row(i, s, a);
        table[s * actions..(s + 1) * actions].copy_from_slice(&row);
        table
    }
}

fn softmax(logits: &[f64]) -> Vec<f64> {
    let max = logits.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let mut out: Vec<f64> = logits.iter().map(|&t| (t - max).exp()).collect();
    let sum: f64 = out.iter().sum();
    for p in out.iter_mut() {
        *p /= sum;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_theta_is_uniform() {
        let policy = SoftmaxPolicy::uniform(&[2, 3], &[3, 4]);
        for a in policy.action_distribution(0, 1) {
            assert!((a - 1.0 / 3.0).abs() < 1e-15);
        }
        for a in policy.action_distribution(1, 2) {
            assert!((a - 0.25).abs() < 1e-15);
        }
    }

    #[test]
    fn spiked_logit_matches_direct_evaluation() {
        let mut policy = SoftmaxPolicy::uniform(&[1], &[3]);
        policy.nudge_theta(0, 0, 0, 10.0);
        let dist = policy.action_distribution(0, 0);
        // 1/(1 + 2 e^{-10}), evaluated independently of the softmax path
        let expected = 1.0 / (1.0 + 2.0 * (-10.0f64).exp());
        assert!((dist[0] - expected).abs() < 1e-12);
        assert!((dist[0] - 0.999909208384).abs() < 1e-12);
    }

    #[test]
    fn shift_invariance() {
        let mut a = SoftmaxPolicy::uniform(&[2], &[3]);
        a.nudge_theta(0, 0, 0, 0.3);
        a.nudge_theta(0, 0, 1, -1.2);
        let before = a.action_distribution(0, 0);
        for act in 0..3 {
            a.nudge_theta(0, 0, act, 17.5);
        }
        let after = a.action_distribution(0, 0);
        for (x, y) in before.iter().zip(&after) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn grad_log_uniform_two_actions() {
        let policy = SoftmaxPolicy::uniform(&[2], &[2]);
        let g = policy.grad_log(0, 1, 0);
        assert_eq!(&g[0..2], &[0.0, 0.0]);
        assert!((g[2] - 0.5).abs() < 1e-15);
        assert!((g[3] + 0.5).abs() < 1e-15);
    }

    #[test]
    fn score_identity_and_norm_bound() {
        let mut policy = SoftmaxPolicy::uniform(&[2], &[4]);
        for s in 0..2 {
            for a in 0..4 {
                policy.nudge_theta(0, s, a, ((s * 7 + a * 3) as f64).sin() * 2.0);
            }
        }
        for s in 0..2 {
            let dist = policy.action_distribution(0, s);
            let mut expectation = vec![0.0; 8];
            for a in 0..4 {
                let g = policy.grad_log(0, s, a);
                let norm: f64 = g.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(norm <= 2f64.sqrt() + 1e-12);
                for (e, gi) in expectation.iter_mut().zip(&g) {
                    *e += dist[a] * gi;
                }
            }
            for e in expectation {
                assert!(e.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn grad_log_matches_central_differences() {
        let mut policy = SoftmaxPolicy::uniform(&[2], &[3]);
        let vals = [0.4, -0.9, 1.7, 0.2, -0.3, 0.8];
        for s in 0..2 {
            for a in 0..3 {
                policy.nudge_theta(0, s, a, vals[s * 3 + a]);
            }
        }
        let eps = 1e-5;
        for s in 0..2 {
            for a in 0..3 {
                let grad = policy.grad_log(0, s, a);
                for ps in 0..2 {
                    for pa in 0..3 {
                        let mut plus = policy.clone();
                        plus.nudge_theta(0, ps, pa, eps);
                        let mut minus = policy.clone();
                        minus.nudge_theta(0, ps, pa, -eps);
                        let fd = (plus.action_prob(0, s, a).ln() - minus.action_prob(0, s, a).ln())
                            / (2.0 * eps);
                        assert!(
                            (fd - grad[ps * 3 + pa]).abs() < 1e-6,
                            "fd {fd} vs grad {}",
                            grad[ps * 3 + pa]
                        );
                    }
                }
            }
        }
    }
}
