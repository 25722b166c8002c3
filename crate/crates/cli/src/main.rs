use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sacnet_cli::commands;
use sacnet_cli::config::ExperimentConfig;
use sacnet_cli::report::OutDir;
use sacnet_cli::CliError;

/// Experiments for average-reward actor-critic on networked MDPs.
#[derive(Parser)]
#[command(name = "sacnet", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Experiment config file (TOML); defaults apply when omitted.
    #[arg(long)]
    config: Option<String>,
    /// Output directory (overrides the config).
    #[arg(long)]
    out: Option<String>,
    /// Root seed (overrides the config).
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Measure Q-function decay profiles over random instances.
    Decay {
        #[command(flatten)]
        common: CommonArgs,
        /// Number of random instances.
        #[arg(long)]
        instances: Option<usize>,
        /// Perturbation trials per instance.
        #[arg(long)]
        trials: Option<usize>,
    },
    /// Check the theory's bounds on one model.
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Largest neighborhood radius to check.
        #[arg(long)]
        kappa: Option<usize>,
    },
    /// Run the scalable actor-critic trainer.
    Train {
        #[command(flatten)]
        common: CommonArgs,
        /// Neighborhood radius for the truncated critics.
        #[arg(long)]
        kappa: Option<usize>,
        /// Trajectory length.
        #[arg(long)]
        horizon: Option<u64>,
        /// Trajectory seeds (comma separated); overrides the config list.
        #[arg(long, value_delimiter = ',')]
        seeds: Option<Vec<u64>>,
        /// Freeze the policy (critic-only run).
        #[arg(long)]
        frozen_policy: bool,
        /// Enable the actor's step rescaling factor.
        #[arg(long, overrides_with = "no_rescale")]
        rescale: bool,
        /// Disable the rescaling factor (the default).
        #[arg(long)]
        no_rescale: bool,
        /// Wireless user grid as ROWSxCOLS, e.g. 5x5.
        #[arg(long)]
        grid: Option<String>,
    },
    /// Evaluate the ALOHA baseline over its send-probability sweep.
    Benchmark {
        #[command(flatten)]
        common: CommonArgs,
        /// Wireless user grid as ROWSxCOLS.
        #[arg(long)]
        grid: Option<String>,
    },
}

fn load_config(common: &CommonArgs) -> Result<ExperimentConfig, CliError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::from_file(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(out) = &common.out {
        cfg.experiment.out_dir = out.clone();
    }
    if let Some(seed) = common.seed {
        cfg.experiment.seed = seed;
    }
    Ok(cfg)
}

fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let parts: Vec<&str> = text.split('x').collect();
    if parts.len() != 2 {
        return Err(CliError::Config(format!("grid {text:?} is not ROWSxCOLS")));
    }
    let rows = parts[0]
        .parse()
        .map_err(|_| CliError::Config(format!("bad grid rows in {text:?}")))?;
    let cols = parts[1]
        .parse()
        .map_err(|_| CliError::Config(format!("bad grid cols in {text:?}")))?;
    Ok((rows, cols))
}

fn run() -> Result<(), CliError> {
    let cli = Cli::parse();
    match cli.command {
        Command::Decay {
            common,
            instances,
            trials,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(v) = instances {
                cfg.decay.instances = v;
            }
            if let Some(v) = trials {
                cfg.decay.trials = v;
            }
            let out = OutDir::new(
                &cfg.experiment.out_dir,
                &cfg.resolved_json(),
                cfg.experiment.seed,
            )?;
            let outcome = commands::cmd_decay(&cfg, &out)?;
            println!(
                "decay: wrote {} and {}",
                outcome.csv.display(),
                outcome.summary.display()
            );
            Ok(())
        }
        Command::Verify { common, kappa } => {
            let mut cfg = load_config(&common)?;
            if let Some(k) = kappa {
                cfg.verify.kappa_max = k;
            }
            let out = OutDir::new(
                &cfg.experiment.out_dir,
                &cfg.resolved_json(),
                cfg.experiment.seed,
            )?;
            let outcome = commands::cmd_verify(&cfg, &out)?;
            for check in &outcome.checks {
                println!(
                    "{} agent={} kappa={}: measured {:.3e} <= bound {:.3e} ... {}",
                    check.name,
                    check.agent,
                    check.kappa,
                    check.measured,
                    check.bound,
                    if check.pass { "pass" } else { "FAIL" }
                );
            }
            if !outcome.condition_met {
                println!(
                    "rho_bound = {:.4} >= 1: bounds not applicable; empirical decay still measured (see report)",
                    outcome.rho_bound
                );
                return Ok(());
            }
            println!(
                "rho_bound = {:.4}; report at {}",
                outcome.rho_bound,
                outcome.report.display()
            );
            if outcome.all_pass {
                Ok(())
            } else {
                Err(CliError::Numerical("a verified bound failed".into()))
            }
        }
        Command::Train {
            common,
            kappa,
            horizon,
            seeds,
            frozen_policy,
            rescale,
            no_rescale,
            grid,
        } => {
            let mut cfg = load_config(&common)?;
            if let Some(k) = kappa {
                cfg.train.kappa = k;
            }
            if let Some(h) = horizon {
                cfg.train.horizon = h;
            }
            if let Some(s) = seeds {
                cfg.train.seeds = s;
            }
            if frozen_policy {
                cfg.train.frozen = true;
            }
            if rescale {
                cfg.train.rescale = true;
            }
            if no_rescale {
                cfg.train.rescale = false;
            }
            if let Some(g) = grid {
                let (rows, cols) = parse_grid(&g)?;
                cfg.wireless.rows = rows;
                cfg.wireless.cols = cols;
            }
            let out = OutDir::new(
                &cfg.experiment.out_dir,
                &cfg.resolved_json(),
                cfg.experiment.seed,
            )?;
            let outcome = commands::cmd_train(&cfg, &out)?;
            println!(
                "train: {} runs, terminal window means {:?}",
                outcome.metric_files.len(),
                outcome.terminal_means
            );
            println!("summary at {}", outcome.summary.display());
            Ok(())
        }
        Command::Benchmark { common, grid } => {
            let mut cfg = load_config(&common)?;
            if let Some(g) = grid {
                let (rows, cols) = parse_grid(&g)?;
                cfg.wireless.rows = rows;
                cfg.wireless.cols = cols;
            }
            let out = OutDir::new(
                &cfg.experiment.out_dir,
                &cfg.resolved_json(),
                cfg.experiment.seed,
            )?;
            let outcome = commands::cmd_benchmark(&cfg, &out)?;
            println!(
                "benchmark: best p_send {} with mean reward {:.4}; wrote {}",
                outcome.best_p_send,
                outcome.best_mean,
                outcome.csv.display()
            );
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
