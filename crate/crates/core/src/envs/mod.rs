//! Training environments.
//!
//! The trainer only needs local observations and sampled local rewards, so
//! it runs against this trait. [`MdpEnv`] adapts a [`FactoredMdp`]; the
//! wireless environment implements it directly (its rewards depend on
//! neighbors' actions, which is outside the factored model class, so the
//! exact oracle refuses it while the trainer does not care).

pub mod random;
pub mod wireless;

use rand::Rng;

use crate::graph::InteractionGraph;
use crate::mdp::FactoredMdp;

pub use random::{random_instance, random_instance_with, RandomInstanceOptions, Topology};
pub use wireless::{
    aloha_action_distribution, build_wireless, evaluate_aloha, AlohaParams, WirelessConfig,
    WirelessEnv,
};

pub trait Environment {
    fn num_agents(&self) -> usize;
    fn state_counts(&self) -> &[usize];
    fn action_counts(&self) -> &[usize];
    fn graph(&self) -> &InteractionGraph;
    fn reward_bound(&self) -> f64;

    /// Draw a uniformly random initial joint state.
    fn reset<R: Rng>(&self, rng: &mut R) -> Vec<usize> {
        self.state_counts()
            .iter()
            .map(|&c| rng.random_range(0..c))
            .collect()
    }

    /// Advance one step; returns the next joint state and per-agent rewards.
    fn step<R: Rng>(
        &self,
        state: &[usize],
        action: &[usize],
        rng: &mut R,
    ) -> (Vec<usize>, Vec<f64>);
}

/// A factored MDP exposed as a training environment.
pub struct MdpEnv<'a> {
    mdp: &'a FactoredMdp,
    state_counts: Vec<usize>,
    action_counts: Vec<usize>,
}

impl<'a> MdpEnv<'a> {
    pub fn new(mdp: &'a FactoredMdp) -> Self {
        let state_counts = mdp.spaces().iter().map(|sp| sp.state_count).collect();
        let action_counts = mdp.spaces().iter().map(|sp| sp.action_count).collect();
        Self {
            mdp,
            state_counts,
            action_counts,
        }
    }

    pub fn mdp(&self) -> &FactoredMdp {
        self.mdp
    }
}

impl Environment for MdpEnv<'_> {
    fn num_agents(&self) -> usize {
        self.mdp.num_agents()
    }

    fn state_counts(&self) -> &[usize] {
        &self.state_counts
    }

    fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn graph(&self) -> &InteractionGraph {
        self.mdp.graph()
    }

    fn reward_bound(&self) -> f64 {
        self.mdp.r_max()
    }

    fn step<R: Rng>(
        &self,
        state: &[usize],
        action: &[usize],
        rng: &mut R,
    ) -> (Vec<usize>, Vec<f64>) {
        let rewards = (0..self.mdp.num_agents())
            .map(|i| self.mdp.reward(i, state[i], action[i]))
            .collect();
        let next = self
            .mdp
            .sample_step(state, action, rng)
            .expect("trainer passes validated states");
        (next, rewards)
    }
}
