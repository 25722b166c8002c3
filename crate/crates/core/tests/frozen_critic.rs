//! Frozen-policy behavior of the trainer against oracle quantities.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sacnet::envs::{random_instance_with, Environment, MdpEnv, RandomInstanceOptions, Topology};
use sacnet::oracle::ExactOracle;
use sacnet::policy::SoftmaxPolicy;
use sacnet::sac::{self, StepSchedule, TrainerConfig};

fn setup() -> (sacnet::mdp::FactoredMdp, SoftmaxPolicy) {
    let opts = RandomInstanceOptions {
        n: 3,
        topology: Topology::Line,
        states: 2,
        actions: 2,
        coupling: 0.25,
    };
    let (mdp, _) = random_instance_with(opts, 7).unwrap();
    let policy = SoftmaxPolicy::uniform(&[2, 2, 2], &[2, 2, 2]);
    (mdp, policy)
}

#[test]
fn mu_hat_matches_average_reward_within_batch_mean_errors() {
    let (mdp, policy0) = setup();
    let env = MdpEnv::new(&mdp);
    let oracle = ExactOracle::new(&mdp, &policy0).unwrap();
    let (_, per_agent) = oracle.average_reward();

    let horizon: u64 = 200_000;
    let config = TrainerConfig {
        kappa: 1,
        horizon,
        schedule: StepSchedule {
            eta0: 0.0,
            ..Default::default()
        },
        seed: 3,
        ..Default::default()
    };
    let mut policy = policy0.clone();
    let run = sac::run(&env, &mut policy, &config, None, 0).unwrap();

    // standard errors by batch means over an independent frozen trajectory
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut state = env.reset(&mut rng);
    let batches = 100usize;
    let batch_len = (horizon as usize) / batches;
    let mut batch_sums = vec![vec![0.0f64; batches]; 3];
    for b in 0..batches {
        for _ in 0..batch_len {
            let action: Vec<usize> = (0..3)
                .map(|i| policy0.sample_action(i, state[i], &mut rng))
                .collect();
            let (next, rewards) = env.step(&state, &action, &mut rng);
            for i in 0..3 {
                batch_sums[i][b] += rewards[i];
            }
            state = next;
        }
    }
    // mu_hat is the weighted average with weights w_t = a_t prod_{s>t}(1-a_s);
    // its variance is the flat average's times T * sum w_t^2
    let mut weights = vec![0.0f64; horizon as usize];
    let mut tail = 1.0;
    for t in (0..horizon).rev() {
        let a = config.schedule.alpha(t);
        weights[t as usize] = a * tail;
        tail *= 1.0 - a;
    }
    let ess_factor = (horizon as f64 * weights.iter().map(|w| w * w).sum::<f64>()).sqrt();

    for i in 0..3 {
        let means: Vec<f64> = batch_sums[i].iter().map(|s| s / batch_len as f64).collect();
        let grand = means.iter().sum::<f64>() / batches as f64;
        let var =
            means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (batches - 1) as f64;
        let se = (var / batches as f64).sqrt() * ess_factor;
        let err = (run.critic.mu[i] - per_agent[i]).abs();
        assert!(
            err <= 3.0 * se,
            "agent {i}: mu_hat {} vs J_i {} is {err:.2e}, 3 se = {:.2e}",
            run.critic.mu[i],
            per_agent[i],
            3.0 * se
        );
    }
}

#[test]
fn frozen_iterates_stay_bounded_over_long_runs() {
    let (mdp, policy0) = setup();
    let env = MdpEnv::new(&mdp);
    let oracle = ExactOracle::new(&mdp, &policy0).unwrap();
    let mu_d = oracle.mixing_norm().unwrap();
    let cap = 10.0 * mdp.r_max() / (1.0 - mu_d);
    let config = TrainerConfig {
        kappa: 1,
        horizon: 1_000_000,
        schedule: StepSchedule {
            eta0: 0.0,
            ..Default::default()
        },
        seed: 5,
        ..Default::default()
    };
    let mut policy = policy0.clone();
    let run = sac::run(&env, &mut policy, &config, None, 0).unwrap();
    assert!(
        run.metrics.q_sup_peak <= cap,
        "sup norm {} exceeded {cap}",
        run.metrics.q_sup_peak
    );
}
