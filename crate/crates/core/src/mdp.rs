//! The networked MDP: per-agent local kernels and rewards on an
//! interaction graph.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::index::MixedRadixIndex;

pub const PROB_TOL: f64 = 1e-12;

/// Local state and action space sizes for one agent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AgentSpace {
    pub state_count: usize,
    pub action_count: usize,
}

impl AgentSpace {
    pub fn new(state_count: usize, action_count: usize) -> Result<Self> {
        if state_count == 0 || action_count == 0 {
            return Err(Error::Dimension(
                "state and action counts must be >= 1".into(),
            ));
        }
        Ok(Self {
            state_count,
            action_count,
        })
    }

    pub fn pair_count(&self) -> usize {
        self.state_count * self.action_count
    }
}

/// Transition table for one agent.
///
/// Rows are indexed by `(s_{N_i}, a_i)` packed little-endian: the state of
/// the lowest-numbered neighbor varies fastest and the own action is the
/// slowest coordinate. Each row is a distribution over the agent's next
/// local state.
#[derive(Debug, Clone)]
pub struct LocalKernel {
    table: Vec<f64>,
    row_index: MixedRadixIndex,
    next_states: usize,
}

impl LocalKernel {
    pub fn new(
        neighbor_state_counts: &[usize],
        action_count: usize,
        next_states: usize,
        table: Vec<f64>,
    ) -> Result<Self> {
        let mut radices = neighbor_state_counts.to_vec();
        radices.push(action_count);
        let row_index = MixedRadixIndex::new(radices);
        let rows = row_index.len();
        if table.len() != rows * next_states {
            return Err(Error::Dimension(format!(
                "kernel table has {} entries, expected {} rows x {} states",
                table.len(),
                rows,
                next_states
            )));
        }
        let kernel = Self {
            table,
            row_index,
            next_states,
        };
        for row in 0..rows {
            kernel.validate_row(row)?;
        }
        Ok(kernel)
    }

    fn validate_row(&self, row: usize) -> Result<()> {
        let r = self.row(row);
        if r.iter().any(|&p| p < 0.0 || !p.is_finite()) {
            return Err(Error::Dimension(format!(
                "kernel row {row} has a negative or non-finite entry"
            )));
        }
        let sum: f64 = r.iter().sum();
        if (sum - 1.0).abs() > PROB_TOL {
            return Err(Error::Dimension(format!(
                "kernel row {row} sums to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn row_count(&self) -> usize {
        self.row_index.len()
    }

    pub fn next_state_count(&self) -> usize {
        self.next_states
    }

    pub fn row(&self, row: usize) -> &[f64] {
        &self.table[row * self.next_states..(row + 1) * self.next_states]
    }

    /// Flat row index for neighbor states (in sorted neighbor order) and own action.
    pub fn row_of(&self, neighbor_states: &[usize], action: usize) -> Result<usize> {
        let mut tuple = neighbor_states.to_vec();
        tuple.push(action);
        self.row_index.encode(&tuple)
    }

    pub fn prob(&self, neighbor_states: &[usize], action: usize, next_state: usize) -> Result<f64> {
        if next_state >= self.next_states {
            return Err(Error::IndexRange(format!(
                "next state {next_state} out of range"
            )));
        }
        Ok(self.row(self.row_of(neighbor_states, action)?)[next_state])
    }
}

/// Stage reward for one agent, indexed by `(s_i, a_i)`.
#[derive(Debug, Clone)]
pub struct LocalReward {
    table: Vec<f64>, // [s * actions + a]
    actions: usize,
}

impl LocalReward {
    pub fn new(states: usize, actions: usize, table: Vec<f64>, r_max: f64) -> Result<Self> {
        if table.len() != states * actions {
            return Err(Error::Dimension(format!(
                "reward table has {} entries, expected {}",
                table.len(),
                states * actions
            )));
        }
        if let Some(bad) = table.iter().find(|&&r| !(0.0..=r_max).contains(&r)) {
            return Err(Error::Dimension(format!(
                "reward {bad} outside [0, {r_max}]"
            )));
        }
        Ok(Self { table, actions })
    }

    #[inline]
    pub fn get(&self, s: usize, a: usize) -> f64 {
        self.table[s * self.actions + a]
    }
}

/// The full networked MDP of the model class: product transitions with
/// neighborhood-local kernels and per-agent rewards.
#[derive(Debug, Clone)]
pub struct FactoredMdp {
    graph: InteractionGraph,
    spaces: Vec<AgentSpace>,
    kernels: Vec<LocalKernel>,
    rewards: Vec<LocalReward>,
    r_max: f64,
}

impl FactoredMdp {
    pub fn new(
        graph: InteractionGraph,
        spaces: Vec<AgentSpace>,
        kernels: Vec<LocalKernel>,
        rewards: Vec<LocalReward>,
        r_max: f64,
    ) -> Result<Self> {
        let n = graph.num_agents();
        if spaces.len() != n || kernels.len() != n || rewards.len() != n {
            return Err(Error::Dimension(format!(
                "expected {n} spaces/kernels/rewards, got {}/{}/{}",
                spaces.len(),
                kernels.len(),
                rewards.len()
            )));
        }
        for i in 0..n {
            let expected_rows: usize = graph
                .neighbors(i)
                .iter()
                .map(|&j| spaces[j].state_count)
                .product::<usize>()
                * spaces[i].action_count;
            if kernels[i].row_count() != expected_rows {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "kernel has {} rows, expected {expected_rows}",
                        kernels[i].row_count()
                    ),
                });
            }
            if kernels[i].next_state_count() != spaces[i].state_count {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "kernel rows have {} entries, expected {}",
                        kernels[i].next_state_count(),
                        spaces[i].state_count
                    ),
                });
            }
        }
        Ok(Self {
            graph,
            spaces,
            kernels,
            rewards,
            r_max,
        })
    }

    pub fn num_agents(&self) -> usize {
        self.graph.num_agents()
    }

    pub fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    pub fn space(&self, i: usize) -> AgentSpace {
        self.spaces[i]
    }

    pub fn spaces(&self) -> &[AgentSpace] {
        &self.spaces
    }

    pub fn kernel(&self, i: usize) -> &LocalKernel {
        &self.kernels[i]
    }

    pub fn reward(&self, i: usize, s: usize, a: usize) -> f64 {
        self.rewards[i].get(s, a)
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    /// Joint state-action space size, `u128` so oversized models are
    /// reported by guards rather than overflowing.
    pub fn joint_pair_count(&self) -> u128 {
        self.spaces
            .iter()
            .map(|sp| sp.pair_count() as u128)
            .product()
    }

    fn neighbor_states(&self, i: usize, state: &[usize]) -> Vec<usize> {
        self.graph.neighbors(i).iter().map(|&j| state[j]).collect()
    }

    fn check_joint(&self, state: &[usize], action: &[usize]) -> Result<()> {
        let n = self.num_agents();
        if state.len() != n || action.len() != n {
            return Err(Error::Dimension(format!(
                "joint state/action length {}/{}, expected {n}",
                state.len(),
                action.len()
            )));
        }
        for i in 0..n {
            if state[i] >= self.spaces[i].state_count || action[i] >= self.spaces[i].action_count {
                return Err(Error::IndexRange(format!(
                    "agent {i}: pair ({}, {})",
                    state[i], action[i]
                )));
            }
        }
        Ok(())
    }

    /// Product transition probability `P(s' | s, a)`.
    pub fn joint_transition_prob(
        &self,
        state: &[usize],
        action: &[usize],
        next_state: &[usize],
    ) -> Result<f64> {
        self.check_joint(state, action)?;
        if next_state.len() != self.num_agents() {
            return Err(Error::Dimension("next state length mismatch".into()));
        }
        let mut p = 1.0;
        for i in 0..self.num_agents() {
            let nbr = self.neighbor_states(i, state);
            p *= self.kernels[i].prob(&nbr, action[i], next_state[i])?;
            if p == 0.0 {
                return Ok(0.0);
            }
        }
        Ok(p)
    }

    /// Draw the next joint state, each agent independently from its kernel row.
    pub fn sample_step<R: Rng>(
        &self,
        state: &[usize],
        action: &[usize],
        rng: &mut R,
    ) -> Result<Vec<usize>> {
        self.check_joint(state, action)?;
        let mut next = Vec::with_capacity(self.num_agents());
        for i in 0..self.num_agents() {
            let nbr = self.neighbor_states(i, state);
            let row = self.kernels[i].row(self.kernels[i].row_of(&nbr, action[i])?);
            next.push(sample_categorical(row, rng));
        }
        Ok(next)
    }

    /// Mean stage reward `(1/n) Σ_i r_i(s_i, a_i)`.
    pub fn mean_reward(&self, state: &[usize], action: &[usize]) -> f64 {
        let n = self.num_agents();
        (0..n)
            .map(|i| self.reward(i, state[i], action[i]))
            .sum::<f64>()
            / n as f64
    }
}

/// Sample an index from an (already normalized) probability row.
pub fn sample_categorical<R: Rng>(row: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (k, &p) in row.iter().enumerate() {
        acc += p;
        if u < acc {
            return k;
        }
    }
    row.len() - 1
}
