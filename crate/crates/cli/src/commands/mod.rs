//! The four experiment subcommands.

mod benchmark;
mod decay;
mod train;
mod verify;

pub use benchmark::cmd_benchmark;
pub use decay::cmd_decay;
pub use train::cmd_train;
pub use verify::cmd_verify;

use sacnet::envs::{
    build_wireless, random_instance_with, RandomInstanceOptions, Topology, WirelessConfig,
    WirelessEnv,
};
use sacnet::mdp::FactoredMdp;
use sacnet::model_file;
use sacnet::policy::SoftmaxPolicy;
use sacnet::seed::substream_seed;

use crate::config::{ExperimentConfig, ModelSource};
use crate::CliError;

/// Resolve an MDP-class model plus its initial policy. Instance `index`
/// selects the generator sub-stream for random models.
pub(crate) fn resolve_mdp(
    cfg: &ExperimentConfig,
    index: u64,
) -> Result<(FactoredMdp, SoftmaxPolicy), CliError> {
    match cfg.model.source {
        ModelSource::Wireless => Err(CliError::ModelClass(
            "wireless rewards depend on neighbors' actions; the exact-oracle commands only \
             accept factored models"
                .into(),
        )),
        ModelSource::File => {
            let mdp = model_file::load_model(std::path::Path::new(&cfg.model.path))?;
            let states: Vec<usize> = mdp.spaces().iter().map(|sp| sp.state_count).collect();
            let actions: Vec<usize> = mdp.spaces().iter().map(|sp| sp.action_count).collect();
            let policy = if cfg.model.policy_path.is_empty() {
                SoftmaxPolicy::uniform(&states, &actions)
            } else {
                let text = std::fs::read_to_string(&cfg.model.policy_path)?;
                model_file::parse_policy(&text, &states, &actions)?
            };
            Ok((mdp, policy))
        }
        ModelSource::Random => {
            let topology = match cfg.model.topology.as_str() {
                "line" => Topology::Line,
                "grid" => Topology::Grid {
                    rows: cfg.model.rows,
                    cols: cfg.model.cols,
                },
                other => return Err(CliError::Config(format!("unknown topology {other:?}"))),
            };
            let opts = RandomInstanceOptions {
                n: cfg.model.agents,
                topology,
                states: cfg.model.states,
                actions: cfg.model.actions,
                coupling: cfg.model.coupling,
            };
            let seed = substream_seed(cfg.experiment.seed, "instance-gen", index);
            let (mdp, policy) = random_instance_with(opts, seed)?;
            Ok((mdp, policy))
        }
    }
}

pub(crate) fn resolve_wireless(cfg: &ExperimentConfig) -> Result<WirelessEnv, CliError> {
    let mut wc = WirelessConfig::new(
        cfg.wireless.rows,
        cfg.wireless.cols,
        substream_seed(cfg.experiment.seed, "wireless-params", 0),
    );
    wc.deadline = cfg.wireless.deadline;
    wc.arrival = cfg.wireless.arrival.clone();
    wc.success = cfg.wireless.success.clone();
    Ok(build_wireless(&wc)?)
}
