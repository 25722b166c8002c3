//! `train`: one scalable actor-critic run per seed, metrics to CSV, final
//! policies to the model-file companion format.

use rayon::prelude::*;
use serde_json::json;

use sacnet::envs::{Environment, MdpEnv};
use sacnet::model_file;
use sacnet::oracle::{gradient_norm, ExactOracle};
use sacnet::policy::SoftmaxPolicy;
use sacnet::sac::{self, RunMetrics, StepSchedule, TrainerConfig};

use crate::config::{ExperimentConfig, ModelSource};
use crate::report::{fmt_f64, OutDir};
use crate::CliError;

pub struct TrainOutcome {
    pub metric_files: Vec<std::path::PathBuf>,
    pub policy_files: Vec<std::path::PathBuf>,
    pub summary: std::path::PathBuf,
    pub terminal_means: Vec<f64>,
}

pub fn cmd_train(cfg: &ExperimentConfig, out: &OutDir) -> Result<TrainOutcome, CliError> {
    cfg.validate()?;
    if cfg.train.oracle_every > 0 && cfg.model.source == ModelSource::Wireless {
        return Err(CliError::ModelClass(
            "oracle-evaluated metrics are unavailable for the wireless environment".into(),
        ));
    }
    let seeds = cfg.train.seeds.clone();
    let results: Vec<Result<SeedRun, CliError>> =
        seeds.par_iter().map(|&seed| run_seed(cfg, seed)).collect();

    let mut metric_files = Vec::new();
    let mut policy_files = Vec::new();
    let mut terminal_means = Vec::new();
    let mut per_seed_json = Vec::new();
    for result in results {
        let r = result?;
        let rows = metrics_rows(&r.metrics, cfg.train.oracle_every > 0);
        let columns: Vec<&str> = if cfg.train.oracle_every > 0 {
            vec!["step", "mean_reward", "mean_mu_hat", "j_exact", "grad_norm"]
        } else {
            vec!["step", "mean_reward", "mean_mu_hat"]
        };
        let csv = out.write_csv(&format!("train_seed{}.csv", r.seed), &columns, &rows)?;
        let policy_path = out.write_text(
            &format!("policy_seed{}.toml", r.seed),
            &model_file::policy_to_string(&r.policy),
        )?;
        terminal_means.push(r.metrics.terminal_window_mean);
        per_seed_json.push(json!({
            "seed": r.seed,
            "terminal_window_mean": r.metrics.terminal_window_mean,
            "q_sup_peak": r.metrics.q_sup_peak,
            "oracle_first": r.metrics.oracle.first().map(|&(t, j, g)| json!({"step": t, "j": j, "grad_norm": g})),
            "oracle_last": r.metrics.oracle.last().map(|&(t, j, g)| json!({"step": t, "j": j, "grad_norm": g})),
        }));
        metric_files.push(csv);
        policy_files.push(policy_path);
    }

    let mean = terminal_means.iter().sum::<f64>() / terminal_means.len().max(1) as f64;
    let var = terminal_means
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / terminal_means.len().max(1) as f64;
    let summary_value = json!({
        "seeds": seeds,
        "terminal_window_mean": mean,
        "terminal_window_std": var.sqrt(),
        "per_seed": per_seed_json,
    });
    let summary = out.write_json("train_summary.json", &summary_value)?;
    Ok(TrainOutcome {
        metric_files,
        policy_files,
        summary,
        terminal_means,
    })
}

struct SeedRun {
    seed: u64,
    metrics: RunMetrics,
    policy: SoftmaxPolicy,
}

fn trainer_config(cfg: &ExperimentConfig, seed: u64) -> TrainerConfig {
    TrainerConfig {
        kappa: cfg.train.kappa,
        horizon: cfg.train.horizon,
        schedule: StepSchedule {
            alpha0: cfg.train.alpha0,
            alpha_exp: cfg.train.alpha_exp,
            eta0: if cfg.train.frozen {
                0.0
            } else {
                cfg.train.eta0
            },
            eta_exp: cfg.train.eta_exp,
        },
        rescale: cfg.train.rescale,
        seed,
        metrics_every: cfg.train.metrics_every,
        reward_window: cfg.train.reward_window,
    }
}

fn run_seed(cfg: &ExperimentConfig, seed: u64) -> Result<SeedRun, CliError> {
    let tc = trainer_config(cfg, seed);
    match cfg.model.source {
        ModelSource::Wireless => {
            let env = super::resolve_wireless(cfg)?;
            let mut policy = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
            let run = sac::run(&env, &mut policy, &tc, None, 0)?;
            Ok(SeedRun {
                seed,
                metrics: run.metrics,
                policy,
            })
        }
        _ => {
            let (mdp, _) = super::resolve_mdp(cfg, 0)?;
            let env = MdpEnv::new(&mdp);
            let mut policy = SoftmaxPolicy::uniform(env.state_counts(), env.action_counts());
            let run = if cfg.train.oracle_every > 0 {
                let mut hook = |p: &SoftmaxPolicy| -> (f64, f64) {
                    match ExactOracle::new(&mdp, p) {
                        Ok(oracle) => {
                            let j = oracle.average_reward().0;
                            let g = oracle
                                .exact_policy_gradient()
                                .map(|g| gradient_norm(&g))
                                .unwrap_or(f64::NAN);
                            (j, g)
                        }
                        Err(_) => (f64::NAN, f64::NAN),
                    }
                };
                sac::run(
                    &env,
                    &mut policy,
                    &tc,
                    Some(&mut hook),
                    cfg.train.oracle_every,
                )?
            } else {
                sac::run(&env, &mut policy, &tc, None, 0)?
            };
            Ok(SeedRun {
                seed,
                metrics: run.metrics,
                policy,
            })
        }
    }
}

fn metrics_rows(metrics: &RunMetrics, with_oracle: bool) -> Vec<Vec<String>> {
    let oracle_at = |step: u64| metrics.oracle.iter().find(|&&(t, _, _)| t == step);
    metrics
        .steps
        .iter()
        .enumerate()
        .map(|(k, &step)| {
            let mut row = vec![
                step.to_string(),
                fmt_f64(metrics.mean_reward[k]),
                fmt_f64(metrics.mean_mu[k]),
            ];
            if with_oracle {
                match oracle_at(step) {
                    Some(&(_, j, g)) => {
                        row.push(fmt_f64(j));
                        row.push(fmt_f64(g));
                    }
                    None => {
                        row.push(String::new());
                        row.push(String::new());
                    }
                }
            }
            row
        })
        .collect()
}
