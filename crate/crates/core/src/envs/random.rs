//! Random problem instances: kernels, rewards and policies drawn under a
//! seed, on line or grid topologies.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::graph::InteractionGraph;
use crate::mdp::{AgentSpace, FactoredMdp, LocalKernel, LocalReward};
use crate::policy::SoftmaxPolicy;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Topology {
    Line,
    Grid { rows: usize, cols: usize },
}

impl Topology {
    fn build(self, n: usize) -> Result<InteractionGraph> {
        match self {
            Topology::Line => Ok(InteractionGraph::line(n)),
            Topology::Grid { rows, cols } => {
                assert_eq!(rows * cols, n, "grid dimensions must match agent count");
                InteractionGraph::grid(rows, cols)
            }
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct RandomInstanceOptions {
    pub n: usize,
    pub topology: Topology,
    pub states: usize,
    pub actions: usize,
    /// Interaction strength in [0, 1]. At 1 the kernels are fully random
    /// (every row an independent simplex draw). Below 1 each row is mixed
    /// with an input-independent base distribution, which caps every
    /// interaction-matrix entry at `coupling` and so keeps the row-sum
    /// condition satisfiable: row sums are at most `coupling * |N_i|`.
    pub coupling: f64,
}

impl RandomInstanceOptions {
    pub fn fully_random(n: usize, topology: Topology, states: usize, actions: usize) -> Self {
        Self {
            n,
            topology,
            states,
            actions,
            coupling: 1.0,
        }
    }
}

/// Draw an instance exactly as the decay experiments do: kernels, rewards
/// and policies uniformly random with maximum reward 1.
pub fn random_instance(
    n: usize,
    topology: Topology,
    states: usize,
    actions: usize,
    seed: u64,
) -> Result<(FactoredMdp, SoftmaxPolicy)> {
    random_instance_with(
        RandomInstanceOptions::fully_random(n, topology, states, actions),
        seed,
    )
}

pub fn random_instance_with(
    opts: RandomInstanceOptions,
    seed: u64,
) -> Result<(FactoredMdp, SoftmaxPolicy)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let graph = opts.topology.build(opts.n)?;
    let spaces: Vec<AgentSpace> = (0..opts.n)
        .map(|_| AgentSpace::new(opts.states, opts.actions))
        .collect::<Result<_>>()?;

    let mut kernels = Vec::with_capacity(opts.n);
    for i in 0..opts.n {
        let neighbor_states: Vec<usize> = graph.neighbors(i).iter().map(|_| opts.states).collect();
        let rows: usize = neighbor_states.iter().product::<usize>() * opts.actions;
        let base = simplex_draw(opts.states, &mut rng);
        let mut table = Vec::with_capacity(rows * opts.states);
        for _ in 0..rows {
            let row = simplex_draw(opts.states, &mut rng);
            for k in 0..opts.states {
                table.push((1.0 - opts.coupling) * base[k] + opts.coupling * row[k]);
            }
        }
        kernels.push(LocalKernel::new(
            &neighbor_states,
            opts.actions,
            opts.states,
            table,
        )?);
    }

    let mut rewards = Vec::with_capacity(opts.n);
    for _ in 0..opts.n {
        let table: Vec<f64> = (0..opts.states * opts.actions)
            .map(|_| rng.random::<f64>())
            .collect();
        rewards.push(LocalReward::new(opts.states, opts.actions, table, 1.0)?);
    }

    // Per-state action distributions drawn on the simplex, stored as logits.
    let mut theta = Vec::with_capacity(opts.n);
    for _ in 0..opts.n {
        let mut t = Vec::with_capacity(opts.states * opts.actions);
        for _ in 0..opts.states {
            let dist = simplex_draw(opts.actions, &mut rng);
            t.extend(dist.iter().map(|p| p.ln()));
        }
        theta.push(t);
    }
    let state_counts = vec![opts.states; opts.n];
    let action_counts = vec![opts.actions; opts.n];
    let policy = SoftmaxPolicy::from_theta(theta, &state_counts, &action_counts)?;

    let mdp = FactoredMdp::new(graph, spaces, kernels, rewards, 1.0)?;
    Ok((mdp, policy))
}

/// Normalized uniform variates.
fn simplex_draw<R: Rng>(k: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..k).map(|_| rng.random::<f64>()).collect();
        let sum: f64 = v.iter().sum();
        if sum > 1e-12 {
            for x in v.iter_mut() {
                *x /= sum;
            }
            return v;
        }
    }
}
