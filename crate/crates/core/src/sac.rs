//! The scalable actor-critic trainer: per-agent average-reward estimates,
//! truncated-Q TD critics with a dummy state-action pair, and the rescaled
//! policy-gradient actor, all on a single trajectory with two-timescale
//! step sizes.

use std::collections::HashMap;

use rand::Rng;

use crate::envs::Environment;
use crate::error::{Error, Result};
use crate::index::pack_pair;
use crate::policy::SoftmaxPolicy;
use crate::seed::stream_rng;

/// Tables larger than this fall back to hash-map storage; the index space
/// of a κ-hop neighborhood can dwarf what a trajectory ever visits.
const DENSE_TABLE_LIMIT: u128 = 1 << 22;

/// Truncated Q table of one agent over `Z_{N_i^kappa}`, flat mixed-radix.
/// The dummy pair's entry always reads 0 and never updates.
#[derive(Debug, Clone)]
pub struct TruncatedQTable {
    agent: usize,
    members: Vec<usize>,
    len: u128,
    dummy: u64,
    storage: Storage,
}

#[derive(Debug, Clone)]
enum Storage {
    Dense(Vec<f64>),
    Sparse(HashMap<u64, f64>),
}

impl TruncatedQTable {
    pub fn new(agent: usize, members: Vec<usize>, zdims: &[usize], dummy: u64) -> Result<Self> {
        let len: u128 = members.iter().map(|&j| zdims[j] as u128).product();
        if len > u64::MAX as u128 {
            return Err(Error::SizeGuard {
                size: len,
                limit: u64::MAX as u128,
            });
        }
        if dummy as u128 >= len {
            return Err(Error::IndexRange(format!(
                "dummy pair {dummy} outside table of {len}"
            )));
        }
        let storage = if len <= DENSE_TABLE_LIMIT {
            Storage::Dense(vec![0.0; len as usize])
        } else {
            Storage::Sparse(HashMap::new())
        };
        Ok(Self {
            agent,
            members,
            len,
            dummy,
            storage,
        })
    }

    pub fn agent(&self) -> usize {
        self.agent
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn len_u128(&self) -> u128 {
        self.len
    }

    pub fn dummy_pair(&self) -> u64 {
        self.dummy
    }

    #[inline]
    pub fn get(&self, idx: u64) -> f64 {
        if idx == self.dummy {
            return 0.0;
        }
        match &self.storage {
            Storage::Dense(v) => v[idx as usize],
            Storage::Sparse(m) => m.get(&idx).copied().unwrap_or(0.0),
        }
    }

    #[inline]
    fn set(&mut self, idx: u64, value: f64) {
        if idx == self.dummy {
            return;
        }
        match &mut self.storage {
            Storage::Dense(v) => v[idx as usize] = value,
            Storage::Sparse(m) => {
                m.insert(idx, value);
            }
        }
    }

    /// Current sup-norm. Dense tables scan in full; sparse tables only ever
    /// hold visited entries.
    pub fn sup_norm(&self) -> f64 {
        match &self.storage {
            Storage::Dense(v) => v.iter().fold(0.0f64, |m, &x| m.max(x.abs())),
            Storage::Sparse(m) => m.values().fold(0.0f64, |acc, &x| acc.max(x.abs())),
        }
    }

    /// Dense view for comparisons against oracle fixed points.
    pub fn to_dense(&self) -> Result<Vec<f64>> {
        if self.len > DENSE_TABLE_LIMIT {
            return Err(Error::SizeGuard {
                size: self.len,
                limit: DENSE_TABLE_LIMIT,
            });
        }
        let mut out = vec![0.0; self.len as usize];
        match &self.storage {
            Storage::Dense(v) => out.copy_from_slice(v),
            Storage::Sparse(m) => {
                for (&k, &v) in m {
                    out[k as usize] = v;
                }
            }
        }
        out[self.dummy as usize] = 0.0;
        Ok(out)
    }
}

/// Projects a joint `(s, a)` observation onto one agent's local flat index.
#[derive(Debug, Clone)]
pub struct LocalProjector {
    members: Vec<usize>,
    strides: Vec<u64>,
    action_counts: Vec<usize>,
}

impl LocalProjector {
    pub fn new(members: &[usize], zdims: &[usize], action_counts: &[usize]) -> Self {
        let mut strides = Vec::with_capacity(members.len());
        let mut acc: u64 = 1;
        for &j in members {
            strides.push(acc);
            acc = acc.saturating_mul(zdims[j] as u64);
        }
        Self {
            members: members.to_vec(),
            strides,
            action_counts: members.iter().map(|&j| action_counts[j]).collect(),
        }
    }

    #[inline]
    pub fn project(&self, state: &[usize], action: &[usize]) -> u64 {
        let mut idx: u64 = 0;
        for (m, &j) in self.members.iter().enumerate() {
            idx += self.strides[m] * pack_pair(state[j], action[j], self.action_counts[m]) as u64;
        }
        idx
    }
}

/// Critic state: per-agent average-reward estimates and truncated Q tables.
#[derive(Debug, Clone)]
pub struct CriticState {
    pub mu: Vec<f64>,
    pub q: Vec<TruncatedQTable>,
}

impl CriticState {
    pub fn zeros<E: Environment>(env: &E, kappa: usize) -> Result<Self> {
        let n = env.num_agents();
        let zdims: Vec<usize> = env
            .state_counts()
            .iter()
            .zip(env.action_counts())
            .map(|(&s, &a)| s * a)
            .collect();
        let q = (0..n)
            .map(|i| {
                let members = env.graph().kappa_neighborhood(i, kappa)?;
                TruncatedQTable::new(i, members, &zdims, 0)
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            mu: vec![0.0; n],
            q,
        })
    }

    /// One TD update for agent `i`. Uses the pre-update average-reward
    /// estimate inside the Q target; no entry changes when the current pair
    /// is the dummy.
    pub fn critic_step(&mut self, i: usize, z_now: u64, reward: f64, z_next: u64, alpha: f64) {
        let mu_old = self.mu[i];
        self.mu[i] = (1.0 - alpha) * mu_old + alpha * reward;
        let table = &mut self.q[i];
        if z_now == table.dummy {
            return;
        }
        let current = table.get(z_now);
        let bootstrap = table.get(z_next);
        table.set(
            z_now,
            (1.0 - alpha) * current + alpha * (reward - mu_old + bootstrap),
        );
    }

    pub fn max_sup_norm(&self) -> f64 {
        self.q.iter().map(|t| t.sup_norm()).fold(0.0, f64::max)
    }
}

/// Two-timescale step sizes `alpha_t = alpha0 / (1+t)^a`,
/// `eta_t = eta0 / (1+t)^e`. The defaults satisfy the square-summable /
/// non-summable conditions along with summability of `(eta_t/alpha_t)^d`
/// for d > 1/(e - a).
#[derive(Debug, Clone, Copy)]
pub struct StepSchedule {
    pub alpha0: f64,
    pub alpha_exp: f64,
    pub eta0: f64,
    pub eta_exp: f64,
}

impl Default for StepSchedule {
    fn default() -> Self {
        Self {
            alpha0: 1.0,
            alpha_exp: 0.75,
            eta0: 1.0,
            eta_exp: 0.99,
        }
    }
}

impl StepSchedule {
    pub fn alpha(&self, t: u64) -> f64 {
        self.alpha0 / (1.0 + t as f64).powf(self.alpha_exp)
    }

    pub fn eta(&self, t: u64) -> f64 {
        self.eta0 / (1.0 + t as f64).powf(self.eta_exp)
    }

    /// Check the step-size conditions: square summable but not summable,
    /// and the actor decaying strictly faster than the critic (unless the
    /// actor is frozen).
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha_exp > 0.5 && self.alpha_exp <= 1.0) {
            return Err(Error::Dimension(format!(
                "critic exponent {} outside (0.5, 1]",
                self.alpha_exp
            )));
        }
        if self.alpha0 <= 0.0 {
            return Err(Error::Dimension("alpha0 must be positive".into()));
        }
        if self.eta0 < 0.0 {
            return Err(Error::Dimension("eta0 must be nonnegative".into()));
        }
        if self.eta0 > 0.0 && self.eta_exp <= self.alpha_exp {
            return Err(Error::Dimension(format!(
                "actor exponent {} must exceed critic exponent {}",
                self.eta_exp, self.alpha_exp
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct TrainerConfig {
    pub kappa: usize,
    pub horizon: u64,
    pub schedule: StepSchedule,
    /// The rescaling factor `1 / (1 + max_j ||Qhat_j||_inf)` on the actor
    /// step. Off by default, matching how the experiments run.
    pub rescale: bool,
    pub seed: u64,
    /// Metrics cadence in steps; a terminal snapshot is always recorded.
    pub metrics_every: u64,
    /// Terminal reward window length.
    pub reward_window: u64,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            kappa: 1,
            horizon: 1,
            schedule: StepSchedule::default(),
            rescale: false,
            seed: 0,
            metrics_every: 100,
            reward_window: 10_000,
        }
    }
}

/// Thinned time series from one run.
#[derive(Debug, Clone, Default)]
pub struct RunMetrics {
    pub steps: Vec<u64>,
    /// Instantaneous mean reward `(1/n) sum_i r_i(t)` at each recorded step.
    pub mean_reward: Vec<f64>,
    /// Mean of the per-agent average-reward estimates.
    pub mean_mu: Vec<f64>,
    /// `(step, J(theta), ||grad J||)` when an oracle hook is attached.
    pub oracle: Vec<(u64, f64, f64)>,
    /// Mean reward over the final `reward_window` steps.
    pub terminal_window_mean: f64,
    /// Largest `||Qhat||_inf` observed at any recorded step.
    pub q_sup_peak: f64,
}

pub struct SacRun {
    pub metrics: RunMetrics,
    pub critic: CriticState,
}

/// Evaluates `(J(theta), ||grad J(theta)||)` for metrics; wired up by
/// callers that hold an exact oracle.
pub type OracleHook<'h> = &'h mut dyn FnMut(&SoftmaxPolicy) -> (f64, f64);

/// One actor update for every agent from the observed `z(t)` and its
/// per-agent local projections:
/// `g_i = grad log zeta_i(a_i|s_i) * (1/n) sum_{j in N_i^kappa} Qhat_j`,
/// `theta_i += eta * Gamma * g_i` with `Gamma = 1/(1 + max_j ||Qhat_j||)`
/// when rescaling is on and 1 otherwise.
pub fn actor_step(
    policy: &mut SoftmaxPolicy,
    critic: &CriticState,
    kappa_members: &[Vec<usize>],
    z_now: &[u64],
    state: &[usize],
    action: &[usize],
    eta: f64,
    rescale: bool,
) {
    let n = critic.q.len();
    let gamma_factor = if rescale {
        1.0 / (1.0 + critic.max_sup_norm())
    } else {
        1.0
    };
    let beta = eta * gamma_factor;
    for i in 0..n {
        let mut acc = 0.0;
        for &j in &kappa_members[i] {
            acc += critic.q[j].get(z_now[j]);
        }
        let weight = beta * acc / n as f64;
        let mut row = policy.grad_log_row(i, state[i], action[i]);
        for g in row.iter_mut() {
            *g *= weight;
        }
        policy.add_to_row(i, state[i], &row);
    }
}

/// Run the single-trajectory loop: observe the reward, advance the
/// environment, sample the next action from the current policy, then do
/// one critic and one actor update per agent. The actor reads the critic
/// tables as they stood at the start of the step, so its inputs are
/// gathered before the critic writes.
pub fn run<E: Environment>(
    env: &E,
    policy: &mut SoftmaxPolicy,
    config: &TrainerConfig,
    mut oracle_hook: Option<OracleHook<'_>>,
    oracle_every: u64,
) -> Result<SacRun> {
    if config.horizon == 0 {
        return Err(Error::Dimension("horizon must be >= 1".into()));
    }
    config.schedule.validate()?;
    let n = env.num_agents();
    let mut critic = CriticState::zeros(env, config.kappa)?;
    let zdims: Vec<usize> = env
        .state_counts()
        .iter()
        .zip(env.action_counts())
        .map(|(&s, &a)| s * a)
        .collect();
    let projectors: Vec<LocalProjector> = (0..n)
        .map(|i| LocalProjector::new(critic.q[i].members(), &zdims, env.action_counts()))
        .collect();
    let kappa_members: Vec<Vec<usize>> = (0..n)
        .map(|i| env.graph().kappa_neighborhood(i, config.kappa))
        .collect::<Result<_>>()?;

    let mut rng = stream_rng(config.seed, "trajectory", 0);
    // random initial state-action pair
    let mut state = env.reset(&mut rng);
    let mut action: Vec<usize> = env
        .action_counts()
        .iter()
        .map(|&c| rng.random_range(0..c))
        .collect();

    let frozen = config.schedule.eta0 == 0.0;
    let mut metrics = RunMetrics::default();
    let window = config.reward_window.min(config.horizon) as usize;
    let mut window_buf = std::collections::VecDeque::with_capacity(window);
    let mut z_now = vec![0u64; n];
    let mut z_next = vec![0u64; n];

    for t in 0..config.horizon {
        let (next_state, rewards) = env.step(&state, &action, &mut rng);
        let next_action: Vec<usize> = (0..n)
            .map(|i| policy.sample_action(i, next_state[i], &mut rng))
            .collect();

        for i in 0..n {
            z_now[i] = projectors[i].project(&state, &action);
            z_next[i] = projectors[i].project(&next_state, &next_action);
        }

        // actor first: it reads the critic as of the start of the step
        if !frozen {
            actor_step(
                policy,
                &critic,
                &kappa_members,
                &z_now,
                &state,
                &action,
                config.schedule.eta(t),
                config.rescale,
            );
        }

        let alpha = config.schedule.alpha(t);
        for i in 0..n {
            critic.critic_step(i, z_now[i], rewards[i], z_next[i], alpha);
        }

        let mean_r = rewards.iter().sum::<f64>() / n as f64;
        if window_buf.len() == window {
            window_buf.pop_front();
        }
        window_buf.push_back(mean_r);

        let last = t + 1 == config.horizon;
        if t % config.metrics_every == 0 || last {
            metrics.steps.push(t);
            metrics.mean_reward.push(mean_r);
            metrics
                .mean_mu
                .push(critic.mu.iter().sum::<f64>() / n as f64);
            metrics.q_sup_peak = metrics.q_sup_peak.max(critic.max_sup_norm());
        }
        if let Some(hook) = oracle_hook.as_mut() {
            if t % oracle_every.max(1) == 0 || last {
                let (j, gnorm) = hook(policy);
                metrics.oracle.push((t, j, gnorm));
            }
        }

        state = next_state;
        action = next_action;
    }
    metrics.terminal_window_mean = window_buf.iter().sum::<f64>() / window_buf.len().max(1) as f64;
    Ok(SacRun { metrics, critic })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{random_instance, MdpEnv, Topology};

    #[test]
    fn critic_step_arithmetic() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 60).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut critic = CriticState::zeros(&env, 1).unwrap();
        // alpha = 0.5, zero tables, r = 1, next pair not dummy
        critic.critic_step(0, 3, 1.0, 5, 0.5);
        assert_eq!(critic.mu[0], 0.5);
        assert_eq!(critic.q[0].get(3), 0.5);
        // other entries untouched
        assert_eq!(critic.q[0].get(5), 0.0);
    }

    #[test]
    fn dummy_current_pair_freezes_q() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 61).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut critic = CriticState::zeros(&env, 1).unwrap();
        critic.critic_step(0, 3, 1.0, 5, 0.5);
        let before = critic.q[0].to_dense().unwrap();
        critic.critic_step(0, 0, 0.7, 3, 0.5); // current pair is the dummy
        assert_eq!(critic.q[0].to_dense().unwrap(), before);
        // mu still updates
        assert!((critic.mu[0] - (0.5 * 0.5 + 0.5 * 0.7)).abs() < 1e-15);
    }

    #[test]
    fn dummy_next_pair_bootstraps_zero() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 62).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut critic = CriticState::zeros(&env, 1).unwrap();
        critic.critic_step(0, 3, 1.0, 0, 0.5); // next pair is the dummy
                                               // entry <- (1-a)*0 + a*(1 - 0 + 0)
        assert_eq!(critic.q[0].get(3), 0.5);
    }

    #[test]
    fn pre_update_mu_used_in_q_target() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 63).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut critic = CriticState::zeros(&env, 1).unwrap();
        critic.mu[0] = 0.4;
        critic.critic_step(0, 3, 1.0, 5, 0.5);
        // target uses mu = 0.4, not the updated 0.7
        assert!((critic.q[0].get(3) - 0.5 * (1.0 - 0.4)).abs() < 1e-15);
        assert!((critic.mu[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn actor_step_hand_computed_two_agents() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 59).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut critic = CriticState::zeros(&env, 1).unwrap();
        let zdims = [4usize, 4];
        let projectors: Vec<LocalProjector> = (0..2)
            .map(|i| LocalProjector::new(critic.q[i].members(), &zdims, &[2, 2]))
            .collect();
        let kappa_members = vec![vec![0, 1], vec![0, 1]];
        let state = [0usize, 1];
        let action = [1usize, 0];
        let z_now: Vec<u64> = (0..2)
            .map(|i| projectors[i].project(&state, &action))
            .collect();
        // both agents observe the full pair space at kappa = 1
        critic.q[0].set(z_now[0], 3.0);
        critic.q[1].set(z_now[1], -1.0);
        // neighborhood sum term: (3 + (-1)) / 2 = 1 for both agents
        let mut policy = SoftmaxPolicy::uniform(&[2, 2], &[2, 2]);
        let eta = 0.2;
        actor_step(
            &mut policy,
            &critic,
            &kappa_members,
            &z_now,
            &state,
            &action,
            eta,
            false,
        );
        for i in 0..2 {
            let grad = SoftmaxPolicy::uniform(&[2, 2], &[2, 2]).grad_log(i, state[i], action[i]);
            for (k, &g) in grad.iter().enumerate() {
                let expected = eta * 1.0 * g;
                let moved = policy.theta(i)[k];
                assert!((moved - expected).abs() < 1e-15, "agent {i} entry {k}");
            }
        }

        // rescaling shrinks the step by 1/(1 + max sup norm) = 1/4
        let mut rescaled = SoftmaxPolicy::uniform(&[2, 2], &[2, 2]);
        actor_step(
            &mut rescaled,
            &critic,
            &kappa_members,
            &z_now,
            &state,
            &action,
            eta,
            true,
        );
        for i in 0..2 {
            for k in 0..4 {
                assert!((rescaled.theta(i)[k] - policy.theta(i)[k] / 4.0).abs() < 1e-15);
            }
        }

        // zero tables leave theta untouched
        let fresh = CriticState::zeros(&env, 1).unwrap();
        let mut untouched = SoftmaxPolicy::uniform(&[2, 2], &[2, 2]);
        actor_step(
            &mut untouched,
            &fresh,
            &kappa_members,
            &z_now,
            &state,
            &action,
            eta,
            true,
        );
        assert_eq!(untouched, SoftmaxPolicy::uniform(&[2, 2], &[2, 2]));
    }

    #[test]
    fn horizon_one_performs_single_update() {
        let (mdp, _) = random_instance(3, Topology::Line, 2, 2, 64).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut policy = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
        let theta_before = policy.clone();
        let config = TrainerConfig {
            horizon: 1,
            kappa: 1,
            ..Default::default()
        };
        let run = run(&env, &mut policy, &config, None, 1000).unwrap();
        assert_eq!(run.metrics.steps.len(), 1);
        // all Q tables are zero at the actor step, so theta must not move,
        // while each agent's mu absorbed exactly one reward sample
        assert_eq!(policy, theta_before);
        for mu in run.critic.mu {
            assert!((0.0..=1.0).contains(&mu));
        }
    }

    #[test]
    fn zero_horizon_rejected() {
        let (mdp, _) = random_instance(2, Topology::Line, 2, 2, 65).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut policy = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
        let config = TrainerConfig {
            horizon: 0,
            ..Default::default()
        };
        assert!(run(&env, &mut policy, &config, None, 1000).is_err());
    }

    #[test]
    fn identical_seeds_give_identical_metrics() {
        let (mdp, _) = random_instance(3, Topology::Line, 2, 2, 66).unwrap();
        let env = MdpEnv::new(&mdp);
        let config = TrainerConfig {
            horizon: 2000,
            kappa: 1,
            seed: 9,
            ..Default::default()
        };
        let mut p1 = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
        let mut p2 = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
        let r1 = run(&env, &mut p1, &config, None, 1000).unwrap();
        let r2 = run(&env, &mut p2, &config, None, 1000).unwrap();
        assert_eq!(r1.metrics.mean_reward, r2.metrics.mean_reward);
        assert_eq!(r1.metrics.mean_mu, r2.metrics.mean_mu);
        assert_eq!(p1, p2);
        let mut p3 = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
        let config2 = TrainerConfig { seed: 10, ..config };
        let r3 = run(&env, &mut p3, &config2, None, 1000).unwrap();
        assert_ne!(r1.metrics.mean_reward, r3.metrics.mean_reward);
    }

    #[test]
    fn frozen_policy_leaves_theta_unchanged() {
        let (mdp, policy0) = random_instance(3, Topology::Line, 2, 2, 67).unwrap();
        let env = MdpEnv::new(&mdp);
        let mut policy = policy0.clone();
        let config = TrainerConfig {
            horizon: 5000,
            kappa: 1,
            schedule: StepSchedule {
                eta0: 0.0,
                ..Default::default()
            },
            ..Default::default()
        };
        let run = run(&env, &mut policy, &config, None, 1000).unwrap();
        assert_eq!(policy, policy0);
        assert!(run.critic.max_sup_norm() > 0.0);
    }

    #[test]
    fn rescale_changes_magnitude_not_direction() {
        let (mdp, policy0) = random_instance(3, Topology::Line, 2, 2, 68).unwrap();
        let env = MdpEnv::new(&mdp);
        let config_off = TrainerConfig {
            horizon: 400,
            kappa: 1,
            seed: 3,
            ..Default::default()
        };
        let config_on = TrainerConfig {
            rescale: true,
            ..config_off.clone()
        };
        let mut p_off = policy0.clone();
        let mut p_on = policy0.clone();
        run(&env, &mut p_off, &config_off, None, 1000).unwrap();
        run(&env, &mut p_on, &config_on, None, 1000).unwrap();
        // trajectories coincide (actions depend on softmax of slightly
        // different theta, but the very first steps are identical), so
        // compare the first update direction: theta deltas collinear.
        // run a single step explicitly for a sharp check
        let mut p1 = policy0.clone();
        let mut p2 = policy0.clone();
        let one = TrainerConfig {
            horizon: 1,
            ..config_off.clone()
        };
        let one_r = TrainerConfig {
            horizon: 1,
            ..config_on.clone()
        };
        run(&env, &mut p1, &one, None, 1000).unwrap();
        run(&env, &mut p2, &one_r, None, 1000).unwrap();
        for i in 0..3 {
            let d1: Vec<f64> = p1
                .theta(i)
                .iter()
                .zip(policy0.theta(i))
                .map(|(a, b)| a - b)
                .collect();
            let d2: Vec<f64> = p2
                .theta(i)
                .iter()
                .zip(policy0.theta(i))
                .map(|(a, b)| a - b)
                .collect();
            // cross products vanish for collinear vectors
            for x in 0..d1.len() {
                for y in 0..d1.len() {
                    assert!((d1[x] * d2[y] - d1[y] * d2[x]).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn sparse_tables_engage_for_huge_neighborhoods() {
        use crate::envs::{build_wireless, WirelessConfig};
        let env = build_wireless(&WirelessConfig::new(3, 3, 0)).unwrap();
        let critic = CriticState::zeros(&env, 1).unwrap();
        // center user's table covers 20^9 pairs; must be sparse
        let center = 4;
        assert_eq!(critic.q[center].members().len(), 9);
        assert!(critic.q[center].len_u128() > DENSE_TABLE_LIMIT);
        assert_eq!(critic.q[center].get(12345), 0.0);
    }
}
