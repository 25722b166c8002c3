//! Experiment configuration: a TOML file with one section per concern,
//! every key optional with documented defaults, unknown keys rejected.
//! Command-line flags override file values after parsing.

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    pub model: ModelSection,
    pub wireless: WirelessSection,
    pub decay: DecaySection,
    pub verify: VerifySection,
    pub train: TrainSection,
    pub benchmark: BenchmarkSection,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSection {
    pub out_dir: String,
    pub seed: u64,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            out_dir: "out".into(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelSource {
    Random,
    File,
    Wireless,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelSection {
    pub source: ModelSource,
    /// Model file path when `source = "file"`.
    pub path: String,
    /// Optional policy file; uniform policy otherwise.
    pub policy_path: String,
    /// Generator settings when `source = "random"`.
    pub topology: String, // "line" or "grid"
    pub rows: usize,
    pub cols: usize,
    pub agents: usize,
    pub states: usize,
    pub actions: usize,
    /// 1.0 = fully random kernels; lower values damp the interactions.
    pub coupling: f64,
}

impl Default for ModelSection {
    fn default() -> Self {
        Self {
            source: ModelSource::Random,
            path: String::new(),
            policy_path: String::new(),
            topology: "line".into(),
            rows: 0,
            cols: 0,
            agents: 6,
            states: 2,
            actions: 3,
            coupling: 1.0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct WirelessSection {
    pub rows: usize,
    pub cols: usize,
    pub deadline: usize,
    pub arrival: Vec<f64>,
    pub success: Vec<f64>,
}

impl Default for WirelessSection {
    fn default() -> Self {
        Self {
            rows: 3,
            cols: 3,
            deadline: 2,
            arrival: Vec::new(),
            success: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DecaySection {
    pub instances: usize,
    pub trials: usize,
    /// Agent whose Q-function gets perturbed; an end of the line by default.
    pub agent: usize,
    /// Defaults to n - 1 when left at 0 with `auto_kappa_max = true`.
    pub kappa_max: usize,
    pub auto_kappa_max: bool,
}

impl Default for DecaySection {
    fn default() -> Self {
        Self {
            instances: 100,
            trials: 100,
            agent: 0,
            kappa_max: 0,
            auto_kappa_max: true,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifySection {
    pub kappa_max: usize,
    pub gamma: f64,
    /// Sampled perturbation trials used when exhaustive enumeration is too
    /// large.
    pub trials: usize,
}

impl Default for VerifySection {
    fn default() -> Self {
        Self {
            kappa_max: 2,
            gamma: 0.9,
            trials: 200,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainSection {
    pub kappa: usize,
    pub horizon: u64,
    pub seeds: Vec<u64>,
    pub alpha0: f64,
    pub alpha_exp: f64,
    pub eta0: f64,
    pub eta_exp: f64,
    pub rescale: bool,
    pub frozen: bool,
    pub metrics_every: u64,
    /// 0 disables oracle-evaluated J/gradient columns.
    pub oracle_every: u64,
    pub reward_window: u64,
}

impl Default for TrainSection {
    fn default() -> Self {
        Self {
            kappa: 1,
            horizon: 200_000,
            seeds: vec![0, 1, 2],
            alpha0: 1.0,
            alpha_exp: 0.75,
            eta0: 1.0,
            eta_exp: 0.99,
            rescale: false,
            frozen: false,
            metrics_every: 100,
            oracle_every: 0,
            reward_window: 10_000,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct BenchmarkSection {
    pub p_send: Vec<f64>,
    pub episodes: usize,
    pub horizon: u64,
    /// Also dump one episode per setting as a step/user/state/action/reward
    /// trace.
    pub trace: bool,
}

impl Default for BenchmarkSection {
    fn default() -> Self {
        Self {
            p_send: vec![0.2, 0.4, 0.6, 0.8],
            episodes: 5,
            horizon: 10_000,
            trace: false,
        }
    }
}

impl ExperimentConfig {
    pub fn from_file(path: &str) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("reading {path}: {e}")))?;
        Self::from_toml(&text)
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.model.source == ModelSource::File && self.model.path.is_empty() {
            return Err(CliError::Config(
                "model.source = \"file\" needs model.path".into(),
            ));
        }
        if self.model.source == ModelSource::Random {
            match self.model.topology.as_str() {
                "line" => {}
                "grid" => {
                    if self.model.rows * self.model.cols != self.model.agents {
                        return Err(CliError::Config(
                            "grid rows*cols must equal model.agents".into(),
                        ));
                    }
                }
                other => {
                    return Err(CliError::Config(format!("unknown topology {other:?}")));
                }
            }
            if !(0.0..=1.0).contains(&self.model.coupling) {
                return Err(CliError::Config("model.coupling must be in [0, 1]".into()));
            }
        }
        for &p in &self.benchmark.p_send {
            if !(0.0..=1.0).contains(&p) {
                return Err(CliError::Config(format!(
                    "benchmark p_send {p} outside [0,1]"
                )));
            }
        }
        Ok(())
    }

    /// Single-line JSON of the resolved configuration, embedded in every
    /// output file so a run can be reproduced from its artifacts alone.
    pub fn resolved_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_parse_from_empty() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg.train.horizon, 200_000);
        assert_eq!(cfg.benchmark.p_send, vec![0.2, 0.4, 0.6, 0.8]);
        cfg.validate().unwrap();
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(ExperimentConfig::from_toml("[train]\nbogus = 1\n").is_err());
        assert!(ExperimentConfig::from_toml("[nonsense]\nx = 1\n").is_err());
    }

    #[test]
    fn file_source_requires_path() {
        let cfg = ExperimentConfig::from_toml("[model]\nsource = \"file\"\n").unwrap();
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn grid_dimensions_checked() {
        let cfg = ExperimentConfig::from_toml(
            "[model]\ntopology = \"grid\"\nrows = 2\ncols = 2\nagents = 5\n",
        )
        .unwrap();
        assert!(cfg.validate().is_err());
    }
}
