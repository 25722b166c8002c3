//! Wireless multi-access environment: a grid of users sharing corner
//! access points, with packet deadlines and collision dynamics, plus the
//! ALOHA baseline policy.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;

use super::Environment;

#[derive(Debug, Clone)]
pub struct WirelessConfig {
    pub rows: usize,
    pub cols: usize,
    /// Packet deadline; state is a binary tuple of this length.
    pub deadline: usize,
    /// Per-user arrival probabilities; drawn uniformly under `seed` if empty.
    pub arrival: Vec<f64>,
    /// Per-access-point success probabilities; drawn uniformly under `seed` if empty.
    pub success: Vec<f64>,
    pub seed: u64,
}

impl WirelessConfig {
    pub fn new(rows: usize, cols: usize, seed: u64) -> Self {
        Self {
            rows,
            cols,
            deadline: 2,
            arrival: Vec::new(),
            success: Vec::new(),
            seed,
        }
    }
}

/// The built environment. Users form an `rows x cols` grid; access points
/// sit on the `(rows+1) x (cols+1)` lattice of cell corners, so every user
/// has exactly four. Users are conflict-graph neighbors iff they share an
/// access point.
#[derive(Debug, Clone)]
pub struct WirelessEnv {
    rows: usize,
    cols: usize,
    deadline: usize,
    arrival: Vec<f64>,
    success: Vec<f64>,
    /// Access points of each user, sorted ascending.
    user_aps: Vec<Vec<usize>>,
    /// Number of users sharing each access point.
    ap_sharers: Vec<usize>,
    graph: InteractionGraph,
    state_counts: Vec<usize>,
    action_counts: Vec<usize>,
}

pub fn build_wireless(config: &WirelessConfig) -> Result<WirelessEnv> {
    let WirelessConfig {
        rows,
        cols,
        deadline,
        seed,
        ..
    } = *config;
    if rows == 0 || cols == 0 {
        return Err(Error::Dimension(
            "wireless grid needs positive dimensions".into(),
        ));
    }
    if deadline == 0 {
        return Err(Error::Dimension("deadline must be >= 1".into()));
    }
    let n = rows * cols;
    let ap_count = (rows + 1) * (cols + 1);
    let ap_id = |r: usize, c: usize| r + c * (rows + 1);
    let user_id = |r: usize, c: usize| r + c * rows;

    let mut user_aps = vec![Vec::new(); n];
    for c in 0..cols {
        for r in 0..rows {
            let u = user_id(r, c);
            user_aps[u] = vec![
                ap_id(r, c),
                ap_id(r + 1, c),
                ap_id(r, c + 1),
                ap_id(r + 1, c + 1),
            ];
            user_aps[u].sort_unstable();
        }
    }

    let mut ap_sharers = vec![0usize; ap_count];
    for aps in &user_aps {
        for &k in aps {
            ap_sharers[k] += 1;
        }
    }

    // conflict graph: adjacent iff the AP sets intersect
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if user_aps[u].iter().any(|k| user_aps[v].contains(k)) {
                edges.push((u, v));
            }
        }
    }
    let graph = InteractionGraph::from_edges(n, &edges)?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let arrival = if config.arrival.is_empty() {
        (0..n).map(|_| rng.random::<f64>()).collect()
    } else {
        config.arrival.clone()
    };
    let success = if config.success.is_empty() {
        (0..ap_count).map(|_| rng.random::<f64>()).collect()
    } else {
        config.success.clone()
    };
    if arrival.len() != n || success.len() != ap_count {
        return Err(Error::Dimension(format!(
            "expected {n} arrival and {ap_count} success probabilities, got {} and {}",
            arrival.len(),
            success.len()
        )));
    }
    for &p in arrival.iter().chain(&success) {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::Dimension(format!("probability {p} outside [0,1]")));
        }
    }

    let state_counts = vec![1usize << deadline; n];
    let action_counts = user_aps.iter().map(|aps| 1 + aps.len()).collect();

    Ok(WirelessEnv {
        rows,
        cols,
        deadline,
        arrival,
        success,
        user_aps,
        ap_sharers,
        graph,
        state_counts,
        action_counts,
    })
}

impl WirelessEnv {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn deadline(&self) -> usize {
        self.deadline
    }

    pub fn arrival(&self) -> &[f64] {
        &self.arrival
    }

    pub fn success(&self) -> &[f64] {
        &self.success
    }

    pub fn user_aps(&self, user: usize) -> &[usize] {
        &self.user_aps[user]
    }

    pub fn ap_sharers(&self, ap: usize) -> usize {
        self.ap_sharers[ap]
    }

    /// Bit m-1 of the state flags a packet with remaining deadline m.
    /// The earliest packet is the most urgent one.
    fn earliest_packet(state: usize) -> Option<usize> {
        if state == 0 {
            None
        } else {
            Some(state.trailing_zeros() as usize + 1)
        }
    }
}

impl Environment for WirelessEnv {
    fn num_agents(&self) -> usize {
        self.rows * self.cols
    }

    fn state_counts(&self) -> &[usize] {
        &self.state_counts
    }

    fn action_counts(&self) -> &[usize] {
        &self.action_counts
    }

    fn graph(&self) -> &InteractionGraph {
        &self.graph
    }

    fn reward_bound(&self) -> f64 {
        1.0
    }

    /// Dynamics order per step: send, resolve collisions and successes,
    /// decrement deadlines (discarding expired packets), then arrivals into
    /// the deadline-`d` slot, which the decrement has always left free.
    fn step<R: Rng>(
        &self,
        state: &[usize],
        action: &[usize],
        rng: &mut R,
    ) -> (Vec<usize>, Vec<f64>) {
        let n = self.num_agents();
        // action 0 is null; users with empty queues are coerced to null
        let mut target_ap = vec![None; n];
        let mut sent_slot = vec![0usize; n];
        let mut ap_contenders = vec![0usize; self.ap_sharers.len()];
        for u in 0..n {
            if action[u] == 0 {
                continue;
            }
            if let Some(m) = Self::earliest_packet(state[u]) {
                let ap = self.user_aps[u][action[u] - 1];
                target_ap[u] = Some(ap);
                sent_slot[u] = m;
                ap_contenders[ap] += 1;
            }
        }

        let mut next = Vec::with_capacity(n);
        let mut rewards = Vec::with_capacity(n);
        for u in 0..n {
            let mut queue = state[u];
            let mut reward = 0.0;
            if let Some(ap) = target_ap[u] {
                if ap_contenders[ap] == 1 && rng.random::<f64>() < self.success[ap] {
                    queue &= !(1 << (sent_slot[u] - 1));
                    reward = 1.0;
                }
            }
            // deadlines decrement; a packet at deadline 1 expires
            queue >>= 1;
            // arrival with deadline d
            if rng.random::<f64>() < self.arrival[u] {
                queue |= 1 << (self.deadline - 1);
            }
            next.push(queue);
            rewards.push(reward);
        }
        (next, rewards)
    }
}

/// ALOHA baseline parameters.
#[derive(Debug, Clone, Copy)]
pub struct AlohaParams {
    pub p_send: f64,
}

/// Stationary ALOHA action distribution for one user: null with probability
/// `1 - p_send`, otherwise an access point with probability proportional to
/// its success probability and inversely proportional to how many users
/// share it. If every available AP has zero weight the send mass falls back
/// to uniform over the APs.
pub fn aloha_action_distribution(env: &WirelessEnv, params: &AlohaParams, user: usize) -> Vec<f64> {
    let aps = env.user_aps(user);
    let mut weights: Vec<f64> = aps
        .iter()
        .map(|&k| env.success()[k] / env.ap_sharers(k) as f64)
        .collect();
    let total: f64 = weights.iter().sum();
    if total <= 0.0 {
        weights = vec![1.0 / aps.len() as f64; aps.len()];
    } else {
        for w in weights.iter_mut() {
            *w /= total;
        }
    }
    let mut dist = Vec::with_capacity(1 + aps.len());
    dist.push(1.0 - params.p_send);
    dist.extend(weights.iter().map(|w| w * params.p_send));
    dist
}

/// Evaluate ALOHA: mean per-user reward per step over a fresh trajectory.
pub fn evaluate_aloha<R: Rng>(
    env: &WirelessEnv,
    params: &AlohaParams,
    horizon: usize,
    rng: &mut R,
) -> f64 {
    let n = env.num_agents();
    let dists: Vec<Vec<f64>> = (0..n)
        .map(|u| aloha_action_distribution(env, params, u))
        .collect();
    let mut state = env.reset(rng);
    let mut total = 0.0;
    for _ in 0..horizon {
        let action: Vec<usize> = (0..n)
            .map(|u| crate::mdp::sample_categorical(&dists[u], rng))
            .collect();
        let (next, rewards) = env.step(&state, &action, rng);
        total += rewards.iter().sum::<f64>() / n as f64;
        state = next;
    }
    total / horizon as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn env(rows: usize, cols: usize) -> WirelessEnv {
        build_wireless(&WirelessConfig::new(rows, cols, 0)).unwrap()
    }

    #[test]
    fn two_by_two_is_complete() {
        let env = env(2, 2);
        for u in 0..4 {
            assert_eq!(env.graph().neighbors(u), &[0, 1, 2, 3]);
        }
    }

    #[test]
    fn single_user_has_no_conflicts() {
        let env = env(1, 1);
        assert_eq!(env.graph().neighbors(0), &[0]);
        assert_eq!(env.action_counts()[0], 5);
    }

    #[test]
    fn five_by_five_interior_has_eight_neighbors() {
        let env = env(5, 5);
        // derive the expected set by AP-sharing over the layout
        let user_id = |r: usize, c: usize| r + c * 5;
        for r in 1..4usize {
            for c in 1..4usize {
                let u = user_id(r, c);
                assert_eq!(env.user_aps(u).len(), 4);
                let mut expected: Vec<usize> = Vec::new();
                for dr in -1i64..=1 {
                    for dc in -1i64..=1 {
                        expected.push(user_id((r as i64 + dr) as usize, (c as i64 + dc) as usize));
                    }
                }
                expected.sort_unstable();
                assert_eq!(env.graph().neighbors(u), expected.as_slice());
            }
        }
    }

    #[test]
    fn collision_blocks_both() {
        let mut config = WirelessConfig::new(1, 2, 0);
        config.arrival = vec![0.0, 0.0];
        config.success = vec![1.0; 6];
        let env = build_wireless(&config).unwrap();
        // the two users share APs 2 and 3 (the middle corners)
        let shared: Vec<usize> = env
            .user_aps(0)
            .iter()
            .filter(|k| env.user_aps(1).contains(k))
            .copied()
            .collect();
        assert_eq!(shared.len(), 2);
        let ap = shared[0];
        let a0 = env.user_aps(0).iter().position(|&k| k == ap).unwrap() + 1;
        let a1 = env.user_aps(1).iter().position(|&k| k == ap).unwrap() + 1;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        // both queues hold a deadline-2 packet
        let (next, rewards) = env.step(&[0b10, 0b10], &[a0, a1], &mut rng);
        assert_eq!(rewards, vec![0.0, 0.0]);
        // packets remain and decrement to deadline 1
        assert_eq!(next, vec![0b01, 0b01]);
    }

    #[test]
    fn lone_sender_with_certain_success() {
        let mut config = WirelessConfig::new(1, 1, 0);
        config.arrival = vec![0.0];
        config.success = vec![1.0; 4];
        let env = build_wireless(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let (next, rewards) = env.step(&[0b01], &[1], &mut rng);
        assert_eq!(rewards, vec![1.0]);
        assert_eq!(next, vec![0]);
    }

    #[test]
    fn null_action_lets_deadline_expire() {
        let mut config = WirelessConfig::new(1, 1, 0);
        config.arrival = vec![0.0];
        config.success = vec![1.0; 4];
        let env = build_wireless(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let (next, rewards) = env.step(&[0b01], &[0], &mut rng);
        assert_eq!(rewards, vec![0.0]);
        assert_eq!(next, vec![0]);
    }

    #[test]
    fn empty_queue_coerced_to_null() {
        let mut config = WirelessConfig::new(1, 1, 0);
        config.arrival = vec![0.0];
        config.success = vec![1.0; 4];
        let env = build_wireless(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let (next, rewards) = env.step(&[0], &[2], &mut rng);
        assert_eq!(rewards, vec![0.0]);
        assert_eq!(next, vec![0]);
    }

    #[test]
    fn earliest_packet_is_most_urgent() {
        assert_eq!(WirelessEnv::earliest_packet(0b10), Some(2));
        assert_eq!(WirelessEnv::earliest_packet(0b11), Some(1));
        assert_eq!(WirelessEnv::earliest_packet(0), None);
    }

    #[test]
    fn aloha_weights_example() {
        // two APs with q = (0.8, 0.4) and sharer counts (2, 1): equal weights
        let mut config = WirelessConfig::new(1, 2, 0);
        config.arrival = vec![0.5, 0.5];
        config.success = vec![0.8, 0.8, 0.8, 0.8, 0.4, 0.4];
        let env = build_wireless(&config).unwrap();
        // fabricate the example numbers directly instead: weight q/sharers
        let q = [0.8, 0.4];
        let sharers = [2.0, 1.0];
        let w: Vec<f64> = q.iter().zip(&sharers).map(|(q, s)| q / s).collect();
        assert!((w[0] - w[1]).abs() < 1e-15);
        // and the env-level distribution sums to 1 with null mass 1 - p_send
        let params = AlohaParams { p_send: 0.6 };
        let dist = aloha_action_distribution(&env, &params, 0);
        assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((dist[0] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn aloha_single_ap_sends_with_p_send() {
        let env = env(1, 1);
        let params = AlohaParams { p_send: 0.3 };
        let dist = aloha_action_distribution(&env, &params, 0);
        assert!((dist[0] - 0.7).abs() < 1e-12);
        let send_mass: f64 = dist[1..].iter().sum();
        assert!((send_mass - 0.3).abs() < 1e-12);
    }

    #[test]
    fn aloha_zero_success_falls_back_to_uniform() {
        let mut config = WirelessConfig::new(1, 1, 0);
        config.arrival = vec![0.5];
        config.success = vec![0.0; 4];
        let env = build_wireless(&config).unwrap();
        let dist = aloha_action_distribution(&env, &AlohaParams { p_send: 0.8 }, 0);
        for k in 1..5 {
            assert!((dist[k] - 0.2).abs() < 1e-12);
        }
    }

    #[test]
    fn aloha_empirical_frequencies_match() {
        let env = env(2, 2);
        let params = AlohaParams { p_send: 0.5 };
        let dist = aloha_action_distribution(&env, &params, 1);
        let mut counts = vec![0usize; dist.len()];
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let trials = 100_000;
        for _ in 0..trials {
            counts[crate::mdp::sample_categorical(&dist, &mut rng)] += 1;
        }
        for (k, &p) in dist.iter().enumerate() {
            let freq = counts[k] as f64 / trials as f64;
            let sigma = (p * (1.0 - p) / trials as f64).sqrt().max(1e-9);
            assert!((freq - p).abs() <= 3.0 * sigma, "action {k}: {freq} vs {p}");
        }
    }

    #[test]
    fn reward_exclusive_per_ap_and_packets_conserved() {
        let config = WirelessConfig::new(2, 3, 7);
        let env = build_wireless(&config).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(40);
        let mut state = env.reset(&mut rng);
        for _ in 0..2000 {
            let action: Vec<usize> = (0..env.num_agents())
                .map(|u| rng.random_range(0..env.action_counts()[u]))
                .collect();
            let (next, rewards) = env.step(&state, &action, &mut rng);
            for (u, &r) in rewards.iter().enumerate() {
                assert!(r == 0.0 || r == 1.0);
                // reward 1 requires a nonempty queue and a real send
                if r == 1.0 {
                    assert!(state[u] != 0 && action[u] != 0);
                }
            }
            // at most one success per AP per step
            let mut ap_success = [0usize; 12];
            for u in 0..env.num_agents() {
                if rewards[u] == 1.0 {
                    ap_success[env.user_aps(u)[action[u] - 1]] += 1;
                }
            }
            assert!(ap_success.iter().all(|&c| c <= 1));
            // packets leave only through success or expiry and enter only
            // through arrival
            for u in 0..env.num_agents() {
                let after_send = if rewards[u] == 1.0 {
                    let m = WirelessEnv::earliest_packet(state[u]).unwrap();
                    state[u] & !(1 << (m - 1))
                } else {
                    state[u]
                };
                let expired = after_send & 1;
                let arrived = (next[u] >> (env.deadline() - 1)) & 1;
                assert_eq!(
                    next[u].count_ones(),
                    after_send.count_ones() - expired as u32 + arrived as u32
                );
            }
            state = next;
        }
    }

    #[test]
    fn transition_depends_only_on_neighborhood() {
        // perturb a non-neighbor's state/action and check user 0's
        // transition distribution is untouched (paired sampling, same seed)
        let mut config = WirelessConfig::new(1, 3, 5);
        config.arrival = vec![0.3, 0.9, 0.4];
        config.success = vec![0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2];
        let env = build_wireless(&config).unwrap();
        // users 0 and 2 are not conflict neighbors on a 1x3 strip
        assert!(!env.graph().neighbors(0).contains(&2));
        let mut outcomes_a = std::collections::BTreeMap::new();
        let mut outcomes_b = std::collections::BTreeMap::new();
        for trial in 0..10_000u64 {
            let mut rng_a = ChaCha8Rng::seed_from_u64(trial);
            let mut rng_b = ChaCha8Rng::seed_from_u64(trial);
            let (na, ra) = env.step(&[0b01, 0b10, 0b01], &[1, 2, 3], &mut rng_a);
            let (nb, rb) = env.step(&[0b01, 0b10, 0b11], &[1, 2, 0], &mut rng_b);
            *outcomes_a.entry((na[0], ra[0] as u8)).or_insert(0usize) += 1;
            *outcomes_b.entry((nb[0], rb[0] as u8)).or_insert(0usize) += 1;
        }
        assert_eq!(outcomes_a, outcomes_b);
    }
}
