//! Measuring how far-coordinate perturbations move a Q-function: the
//! empirical side of the exponential decay property.

use rand::Rng;

use crate::error::Result;

use super::ExactOracle;

/// Measured perturbation values per κ over a set of trials, plus the
/// derived percentiles and fitted decay rate.
#[derive(Debug, Clone)]
pub struct DecayProfile {
    pub agent: usize,
    /// `values[kappa][trial]`, κ from 0 to kappa_max inclusive.
    pub values: Vec<Vec<f64>>,
}

impl DecayProfile {
    pub fn kappa_max(&self) -> usize {
        self.values.len() - 1
    }

    pub fn percentile(&self, kappa: usize, q: f64) -> f64 {
        let mut v = self.values[kappa].clone();
        v.sort_by(|a, b| a.partial_cmp(b).expect("finite decay values"));
        if v.is_empty() {
            return 0.0;
        }
        let pos = q / 100.0 * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = pos - lo as f64;
        v[lo] * (1.0 - frac) + v[hi] * frac
    }

    pub fn medians(&self) -> Vec<f64> {
        (0..self.values.len())
            .map(|k| self.percentile(k, 50.0))
            .collect()
    }

    /// Export as CSV with columns `kappa,trial,value`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kappa,trial,value\n");
        for (kappa, per_trial) in self.values.iter().enumerate() {
            for (trial, v) in per_trial.iter().enumerate() {
                out.push_str(&format!("{kappa},{trial},{v}\n"));
            }
        }
        out
    }

    /// Least-squares exponential fit of the median profile: regress
    /// `log(median)` on κ over the strictly positive medians and return
    /// `exp(slope)`. Fewer than two positive points mean the profile has
    /// already collapsed to zero, reported as rate 0.
    pub fn fitted_rate(&self) -> f64 {
        let pts: Vec<(f64, f64)> = self
            .medians()
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0.0)
            .map(|(k, &m)| (k as f64, m.ln()))
            .collect();
        if pts.len() < 2 {
            return 0.0;
        }
        let n = pts.len() as f64;
        let sx: f64 = pts.iter().map(|(x, _)| x).sum();
        let sy: f64 = pts.iter().map(|(_, y)| y).sum();
        let sxx: f64 = pts.iter().map(|(x, _)| x * x).sum();
        let sxy: f64 = pts.iter().map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        slope.exp()
    }
}

/// For each trial draw `(z, z')` uniformly, overwrite `z'` inside `N_i^κ`
/// with `z`'s coordinates and record `|q(z) - q(z'')|`, for every κ up to
/// `kappa_max`.
pub(super) fn decay_profile<R: Rng>(
    oracle: &ExactOracle,
    i: usize,
    kappa_max: usize,
    trials: usize,
    q: &[f64],
    rng: &mut R,
) -> DecayProfile {
    let space = oracle.space();
    let graph = oracle.mdp().graph();
    let members: Vec<Vec<usize>> = (0..=kappa_max)
        .map(|k| graph.kappa_neighborhood(i, k).expect("agent in range"))
        .collect();
    let mut values = vec![Vec::with_capacity(trials); kappa_max + 1];
    for _ in 0..trials {
        let z1 = rng.random_range(0..space.size());
        let z2 = rng.random_range(0..space.size());
        for (k, m) in members.iter().enumerate() {
            let z3 = space.overwrite(z2, z1, m);
            values[k].push((q[z1] - q[z3]).abs());
        }
    }
    DecayProfile { agent: i, values }
}

/// Exact sup over all perturbation pairs: enumerate every `z` and every
/// assignment of the complement coordinates.
pub(super) fn decay_sup_exhaustive(
    oracle: &ExactOracle,
    q: &[f64],
    i: usize,
    kappa: usize,
) -> Result<f64> {
    let space = oracle.space();
    let complement = oracle.mdp().graph().kappa_complement(i, kappa)?;
    let outside = super::space::LocalPairSpace::new(space, &complement);
    let mut sup: f64 = 0.0;
    // z'' = z with the complement coordinates replaced by each assignment;
    // enumerate assignments via representative global indices
    let mut rep = vec![0usize; outside.size()];
    {
        let mut seen = vec![false; outside.size()];
        for z in 0..space.size() {
            let u = outside.project(space, z);
            if !seen[u] {
                seen[u] = true;
                rep[u] = z;
            }
        }
    }
    for z in 0..space.size() {
        let qz = q[z];
        for &r in &rep {
            let z3 = space.overwrite(z, r, &complement);
            let d = (qz - q[z3]).abs();
            if d > sup {
                sup = d;
            }
        }
    }
    Ok(sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::envs::{random_instance, Topology};
    use crate::oracle::ExactOracle;
    use rand_chacha::rand_core::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn empty_complement_measures_zero() {
        let (mdp, policy) = random_instance(3, Topology::Line, 2, 2, 50).unwrap();
        let oracle = ExactOracle::new(&mdp, &policy).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let profile = oracle.decay_profile(0, 2, 25, &mut rng).unwrap();
        assert!(profile.values[2].iter().all(|&v| v == 0.0));
    }

    #[test]
    fn values_bounded_by_q_range() {
        let (mdp, policy) = random_instance(3, Topology::Line, 2, 2, 51).unwrap();
        let oracle = ExactOracle::new(&mdp, &policy).unwrap();
        let q = oracle.local_q(0).unwrap();
        let qmax = q.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let profile = oracle.decay_profile(0, 2, 50, &mut rng).unwrap();
        for per_kappa in &profile.values {
            for &v in per_kappa {
                assert!(v >= 0.0 && v <= 2.0 * qmax + 1e-12);
            }
        }
    }

    #[test]
    fn exhaustive_sup_dominates_sampled_values() {
        let (mdp, policy) = random_instance(3, Topology::Line, 2, 2, 52).unwrap();
        let oracle = ExactOracle::new(&mdp, &policy).unwrap();
        let q = oracle.local_q(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let profile = oracle.decay_profile(0, 2, 200, &mut rng).unwrap();
        for kappa in 0..=2 {
            let sup = oracle.decay_sup_exhaustive(&q, 0, kappa).unwrap();
            for &v in &profile.values[kappa] {
                assert!(v <= sup + 1e-12);
            }
        }
    }

    #[test]
    fn fitted_rate_handles_degenerate_profiles() {
        let flat = DecayProfile {
            agent: 0,
            values: vec![vec![0.0; 5], vec![0.0; 5]],
        };
        assert_eq!(flat.fitted_rate(), 0.0);
        let geometric = DecayProfile {
            agent: 0,
            values: vec![vec![1.0; 5], vec![0.5; 5], vec![0.25; 5]],
        };
        assert!((geometric.fitted_rate() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn csv_export_shape() {
        let profile = DecayProfile {
            agent: 0,
            values: vec![vec![1.0, 2.0], vec![0.5, 0.25]],
        };
        let csv = profile.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "kappa,trial,value");
        assert_eq!(lines.len(), 5);
        assert_eq!(lines[3], "1,0,0.5");
    }

    #[test]
    fn percentiles_are_ordered() {
        let (mdp, policy) = random_instance(3, Topology::Line, 2, 2, 53).unwrap();
        let oracle = ExactOracle::new(&mdp, &policy).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let profile = oracle.decay_profile(0, 1, 100, &mut rng).unwrap();
        for kappa in 0..=1 {
            let p10 = profile.percentile(kappa, 10.0);
            let p50 = profile.percentile(kappa, 50.0);
            let p90 = profile.percentile(kappa, 90.0);
            assert!(p10 <= p50 && p50 <= p90);
        }
    }
}
