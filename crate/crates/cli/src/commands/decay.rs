//! `decay`: measure Q-function perturbation profiles over random
//! instances and fit their exponential rate.

use rayon::prelude::*;
use serde_json::json;

use sacnet::oracle::{interaction_matrix, ExactOracle, OracleOptions};
use sacnet::seed::stream_rng;

use crate::config::ExperimentConfig;
use crate::report::{fmt_f64, OutDir};
use crate::CliError;

pub struct DecayOutcome {
    pub csv: std::path::PathBuf,
    pub summary: std::path::PathBuf,
    pub rates: Vec<f64>,
    pub rho_bounds: Vec<f64>,
}

pub fn cmd_decay(cfg: &ExperimentConfig, out: &OutDir) -> Result<DecayOutcome, CliError> {
    cfg.validate()?;
    let instances = cfg.decay.instances.max(1);
    let per_instance: Vec<Result<InstanceResult, CliError>> = (0..instances as u64)
        .into_par_iter()
        .map(|idx| run_instance(cfg, idx))
        .collect();

    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    let mut rates = Vec::new();
    let mut rho_bounds = Vec::new();
    for (idx, result) in per_instance.into_iter().enumerate() {
        let r = result?;
        for (kappa, per_trial) in r.values.iter().enumerate() {
            for (trial, &v) in per_trial.iter().enumerate() {
                if !v.is_finite() {
                    return Err(CliError::Numerical(format!(
                        "instance {idx} produced a non-finite decay value"
                    )));
                }
                rows.push(vec![
                    idx.to_string(),
                    kappa.to_string(),
                    trial.to_string(),
                    fmt_f64(v),
                ]);
            }
        }
        summaries.push(json!({
            "instance": idx,
            "rho_bound": r.rho_bound,
            "condition_met": r.rho_bound < 1.0,
            "fitted_rate": r.rate,
            "median": r.medians,
            "p10": r.p10,
            "p90": r.p90,
        }));
        rates.push(r.rate);
        rho_bounds.push(r.rho_bound);
    }

    let csv = out.write_csv("decay.csv", &["instance", "kappa", "trial", "value"], &rows)?;
    let rate_below_one = rates.iter().filter(|&&r| r < 1.0).count();
    let summary_value = json!({
        "instances": instances,
        "trials": cfg.decay.trials,
        "agent": cfg.decay.agent,
        "fraction_rate_below_one": rate_below_one as f64 / instances as f64,
        "per_instance": summaries,
    });
    let summary = out.write_json("decay_summary.json", &summary_value)?;
    Ok(DecayOutcome {
        csv,
        summary,
        rates,
        rho_bounds,
    })
}

struct InstanceResult {
    values: Vec<Vec<f64>>,
    medians: Vec<f64>,
    p10: Vec<f64>,
    p90: Vec<f64>,
    rate: f64,
    rho_bound: f64,
}

fn run_instance(cfg: &ExperimentConfig, idx: u64) -> Result<InstanceResult, CliError> {
    let (mdp, policy) = super::resolve_mdp(cfg, idx)?;
    let kappa_max = if cfg.decay.auto_kappa_max && cfg.decay.kappa_max == 0 {
        mdp.num_agents().saturating_sub(1)
    } else {
        cfg.decay.kappa_max
    };
    let c = interaction_matrix(&mdp, &OracleOptions::default())?;
    let oracle = ExactOracle::new(&mdp, &policy)?;
    let mut rng = stream_rng(cfg.experiment.seed, "decay-trials", idx);
    let profile = oracle.decay_profile(cfg.decay.agent, kappa_max, cfg.decay.trials, &mut rng)?;
    Ok(InstanceResult {
        medians: profile.medians(),
        p10: (0..=kappa_max)
            .map(|k| profile.percentile(k, 10.0))
            .collect(),
        p90: (0..=kappa_max)
            .map(|k| profile.percentile(k, 90.0))
            .collect(),
        rate: profile.fitted_rate(),
        values: profile.values,
        rho_bound: c.rho_bound,
    })
}
