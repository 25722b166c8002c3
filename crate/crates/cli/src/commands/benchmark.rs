//! `benchmark`: evaluate the ALOHA baseline over a send-probability sweep.

use serde_json::json;

use sacnet::envs::{
    aloha_action_distribution, evaluate_aloha, AlohaParams, Environment, WirelessEnv,
};
use sacnet::mdp::sample_categorical;
use sacnet::seed::stream_rng;

use crate::config::ExperimentConfig;
use crate::report::{fmt_f64, OutDir};
use crate::CliError;

pub struct BenchmarkOutcome {
    pub csv: std::path::PathBuf,
    pub summary: std::path::PathBuf,
    pub best_p_send: f64,
    pub best_mean: f64,
}

pub fn cmd_benchmark(cfg: &ExperimentConfig, out: &OutDir) -> Result<BenchmarkOutcome, CliError> {
    cfg.validate()?;
    let env = super::resolve_wireless(cfg)?;
    let mut rows = Vec::new();
    let mut settings = Vec::new();
    for (pi, &p_send) in cfg.benchmark.p_send.iter().enumerate() {
        let params = AlohaParams { p_send };
        let mut means = Vec::with_capacity(cfg.benchmark.episodes);
        for episode in 0..cfg.benchmark.episodes {
            let stream = (pi * cfg.benchmark.episodes + episode) as u64;
            let mut rng = stream_rng(cfg.experiment.seed, "evaluation", stream);
            let mean = evaluate_aloha(&env, &params, cfg.benchmark.horizon as usize, &mut rng);
            rows.push(vec![fmt_f64(p_send), episode.to_string(), fmt_f64(mean)]);
            means.push(mean);
        }
        let mean = means.iter().sum::<f64>() / means.len().max(1) as f64;
        settings.push((p_send, mean));
        if cfg.benchmark.trace {
            let mut rng = stream_rng(cfg.experiment.seed, "trace", pi as u64);
            let trace = trace_episode(&env, &params, cfg.benchmark.horizon as usize, &mut rng);
            out.write_csv(
                &format!("trace_p{}.csv", fmt_f64(p_send)),
                &["step", "user", "state", "action", "reward"],
                &trace,
            )?;
        }
    }
    let csv = out.write_csv(
        "benchmark.csv",
        &["p_send", "episode", "mean_reward"],
        &rows,
    )?;

    let (best_p_send, best_mean) = settings
        .iter()
        .copied()
        .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite means"))
        .unwrap_or((0.0, 0.0));
    let summary_value = json!({
        "settings": settings.iter().map(|&(p, m)| json!({"p_send": p, "mean_reward": m})).collect::<Vec<_>>(),
        "best_p_send": best_p_send,
        "best_mean_reward": best_mean,
    });
    let summary = out.write_json("benchmark_summary.json", &summary_value)?;
    Ok(BenchmarkOutcome {
        csv,
        summary,
        best_p_send,
        best_mean,
    })
}

/// One ALOHA episode with per-step rows. States print as the deadline
/// tuple (e_1 .. e_d).
fn trace_episode(
    env: &WirelessEnv,
    params: &AlohaParams,
    horizon: usize,
    rng: &mut impl rand::Rng,
) -> Vec<Vec<String>> {
    let n = env.num_agents();
    let dists: Vec<Vec<f64>> = (0..n)
        .map(|u| aloha_action_distribution(env, params, u))
        .collect();
    let show_state = |s: usize| -> String {
        (0..env.deadline())
            .map(|m| if s >> m & 1 == 1 { '1' } else { '0' })
            .collect()
    };
    let mut rows = Vec::with_capacity(horizon * n);
    let mut state = env.reset(rng);
    for step in 0..horizon {
        let action: Vec<usize> = (0..n).map(|u| sample_categorical(&dists[u], rng)).collect();
        let (next, rewards) = env.step(&state, &action, rng);
        for u in 0..n {
            rows.push(vec![
                step.to_string(),
                u.to_string(),
                show_state(state[u]),
                action[u].to_string(),
                fmt_f64(rewards[u]),
            ]);
        }
        state = next;
    }
    rows
}
