//! Exact computation of the theory's quantities on small instances:
//! stationary distributions, average rewards, Q-functions, policy
//! gradients, truncations, interaction matrices, decay profiles and the
//! critic's fixed point. Everything here is a pure function of the model
//! and policy; nothing samples except the decay trials, which take an
//! explicit RNG.

mod chain;
mod critic;
mod decay;
mod gradient;
mod interaction;
mod linalg;
mod qfunction;
mod space;
mod tensor;
mod truncation;

pub use chain::InducedChain;
pub use critic::CriticFixedPoint;
pub use decay::DecayProfile;
pub use gradient::gradient_norm;
pub use interaction::{interaction_matrix, tv_distance, InteractionMatrix};
pub use space::{JointSpace, LocalPairSpace};
pub use truncation::{TruncatedQ, TruncationWeights};

use rand::Rng;

use crate::error::{Error, Result};
use crate::mdp::FactoredMdp;
use crate::policy::SoftmaxPolicy;

#[derive(Debug, Clone, Copy)]
pub struct OracleOptions {
    /// Hard cap on the joint state-action space size.
    pub size_guard: u128,
    /// Above this size linear solves switch to iterative methods and the
    /// transition matrix is never materialized.
    pub dense_limit: usize,
    /// Cap on one agent's kernel-row enumeration in the interaction matrix.
    pub interaction_guard: u128,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            size_guard: 10_000_000,
            dense_limit: 4096,
            interaction_guard: 10_000_000,
        }
    }
}

/// Exact quantities for one `(mdp, policy)` pair. Building it computes the
/// induced chain and its stationary distribution once.
pub struct ExactOracle<'a> {
    mdp: &'a FactoredMdp,
    policy: &'a SoftmaxPolicy,
    chain: InducedChain,
    pi: Vec<f64>,
}

impl<'a> ExactOracle<'a> {
    pub fn new(mdp: &'a FactoredMdp, policy: &'a SoftmaxPolicy) -> Result<Self> {
        Self::with_options(mdp, policy, &OracleOptions::default())
    }

    pub fn with_options(
        mdp: &'a FactoredMdp,
        policy: &'a SoftmaxPolicy,
        opts: &OracleOptions,
    ) -> Result<Self> {
        let chain = InducedChain::new(mdp, policy, opts)?;
        let pi = chain.stationary_distribution()?;
        Ok(Self {
            mdp,
            policy,
            chain,
            pi,
        })
    }

    pub fn mdp(&self) -> &FactoredMdp {
        self.mdp
    }

    pub fn policy(&self) -> &SoftmaxPolicy {
        self.policy
    }

    pub fn chain(&self) -> &InducedChain {
        &self.chain
    }

    pub fn space(&self) -> &JointSpace {
        self.chain.space()
    }

    pub fn stationary(&self) -> &[f64] {
        &self.pi
    }

    /// The local reward of agent `i` as a vector over `Z`.
    pub fn reward_vector(&self, i: usize) -> Vec<f64> {
        let space = self.space();
        (0..space.size())
            .map(|z| {
                let (s, a) = space.state_action(z, i);
                self.mdp.reward(i, s, a)
            })
            .collect()
    }

    /// `(J, J_i)`: global and per-agent average reward under stationarity.
    pub fn average_reward(&self) -> (f64, Vec<f64>) {
        let n = self.mdp.num_agents();
        let space = self.space();
        let mut per_agent = vec![0.0; n];
        for (z, &p) in self.pi.iter().enumerate() {
            for (i, ja) in per_agent.iter_mut().enumerate() {
                let (s, a) = space.state_action(z, i);
                *ja += p * self.mdp.reward(i, s, a);
            }
        }
        let j = per_agent.iter().sum::<f64>() / n as f64;
        (j, per_agent)
    }

    /// Average-reward Q-function of agent `i`, normalized to stationary
    /// mean zero. Solves the Poisson equation directly on the dense path
    /// and by series summation otherwise.
    pub fn local_q(&self, i: usize) -> Result<Vec<f64>> {
        let j_i = self.average_reward().1[i];
        let mut d = self.reward_vector(i);
        for x in d.iter_mut() {
            *x -= j_i;
        }
        qfunction::poisson_solve(&self.chain, &self.pi, &d)
    }

    /// All agents' Q-functions.
    pub fn all_q(&self) -> Result<Vec<Vec<f64>>> {
        let (_, per_agent) = self.average_reward();
        (0..self.mdp.num_agents())
            .map(|i| {
                let mut d = self.reward_vector(i);
                for x in d.iter_mut() {
                    *x -= per_agent[i];
                }
                qfunction::poisson_solve(&self.chain, &self.pi, &d)
            })
            .collect()
    }

    /// Discounted Q-function `Q = r_i + gamma P Q`.
    pub fn discounted_q(&self, i: usize, gamma: f64) -> Result<Vec<f64>> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(Error::Dimension(format!("gamma {gamma} outside [0, 1)")));
        }
        let r = self.reward_vector(i);
        qfunction::discounted_solve(&self.chain, &r, gamma)
    }

    /// Exact policy gradient tables, one per agent, shaped like theta.
    pub fn exact_policy_gradient(&self) -> Result<Vec<Vec<f64>>> {
        gradient::exact_policy_gradient(self)
    }

    /// Truncated Q-function of agent `i` over `Z_{N_i^kappa}`.
    pub fn truncated_q(
        &self,
        i: usize,
        kappa: usize,
        weights: TruncationWeights,
    ) -> Result<TruncatedQ> {
        let q = self.local_q(i)?;
        truncation::truncated_q(self, i, kappa, weights, &q)
    }

    /// Approximated policy gradient built from truncated Q-functions.
    pub fn approx_policy_gradient(
        &self,
        kappa: usize,
        weights: TruncationWeights,
    ) -> Result<Vec<Vec<f64>>> {
        gradient::approx_policy_gradient(self, kappa, weights)
    }

    /// Weighted operator norm `mu_D` of `P - 1 pi^T` (Jacobi eigensolve on
    /// the symmetrized problem; dense path only).
    pub fn mixing_norm(&self) -> Result<f64> {
        self.chain.mixing_norm(&self.pi)
    }

    /// Fixed point of the frozen-policy critic update for agent `i`:
    /// average-reward estimate and truncated Q table with the dummy pair
    /// pinned to zero.
    pub fn critic_fixed_point(
        &self,
        i: usize,
        kappa: usize,
        dummy_pair: usize,
    ) -> Result<CriticFixedPoint> {
        critic::critic_fixed_point(self, i, kappa, dummy_pair)
    }

    /// Measured decay profile of agent `i`'s Q-function under random
    /// far-coordinate perturbations.
    pub fn decay_profile<R: Rng>(
        &self,
        i: usize,
        kappa_max: usize,
        trials: usize,
        rng: &mut R,
    ) -> Result<DecayProfile> {
        let q = self.local_q(i)?;
        Ok(decay::decay_profile(self, i, kappa_max, trials, &q, rng))
    }

    /// Same perturbation measurement against an arbitrary value vector
    /// (used for the discounted-case decay checks).
    pub fn decay_profile_of<R: Rng>(
        &self,
        values: &[f64],
        i: usize,
        kappa_max: usize,
        trials: usize,
        rng: &mut R,
    ) -> Result<DecayProfile> {
        if values.len() != self.space().size() {
            return Err(Error::Dimension("value vector length".into()));
        }
        Ok(decay::decay_profile(
            self, i, kappa_max, trials, values, rng,
        ))
    }

    /// Exhaustive sup of `|q(z) - q(z'')|` over pairs agreeing on
    /// `N_i^kappa`, the exact left-hand side of the decay property.
    pub fn decay_sup_exhaustive(&self, values: &[f64], i: usize, kappa: usize) -> Result<f64> {
        decay::decay_sup_exhaustive(self, values, i, kappa)
    }
}
