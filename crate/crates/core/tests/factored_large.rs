//! End-to-end checks of the factored (matrix-free) oracle path at the
//! decay-measurement scale: a 6-agent line with |S_i| = 2, |A_i| = 3,
//! |Z| = 46656, too large for a dense transition matrix.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sacnet::envs::{random_instance, Topology};
use sacnet::oracle::ExactOracle;

#[test]
fn six_agent_line_oracle() {
    let started = std::time::Instant::now();
    let (mdp, policy) = random_instance(6, Topology::Line, 2, 3, 1234).unwrap();
    let oracle = ExactOracle::new(&mdp, &policy).unwrap();
    assert!(!oracle.chain().is_dense());
    assert_eq!(oracle.space().size(), 46656);
    let build = started.elapsed();

    // stationary distribution is a genuine fixed point
    let pi = oracle.stationary();
    assert!((pi.iter().sum::<f64>() - 1.0).abs() < 1e-10);
    let pushed = oracle.chain().push_distribution(pi);
    let residual: f64 = pushed.iter().zip(pi).map(|(a, b)| (a - b).abs()).sum();
    assert!(residual <= 1e-12, "residual {residual:.3e}");

    // Q solves its Poisson equation
    let t_q = std::time::Instant::now();
    let q = oracle.local_q(0).unwrap();
    let q_time = t_q.elapsed();
    let (_, per_agent) = oracle.average_reward();
    let r = oracle.reward_vector(0);
    let pq = oracle.chain().apply_values(&q);
    let worst = (0..q.len())
        .map(|z| (q[z] - (r[z] - per_agent[0] + pq[z])).abs())
        .fold(0.0f64, f64::max);
    assert!(worst < 1e-10, "bellman residual {worst:.3e}");

    // decay trials at the far end measure exactly zero
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let profile = oracle.decay_profile(0, 5, 100, &mut rng).unwrap();
    assert!(profile.values[5].iter().all(|&v| v == 0.0));
    let medians = profile.medians();
    println!(
        "n=6 line: build+pi {:?}, q {:?}, medians {:?}, fitted rate {:.3}",
        build,
        q_time,
        medians,
        profile.fitted_rate()
    );
}
