//! Loading and saving models and policies as structured text (TOML).
//!
//! A model file declares the agent count, edge list, per-agent space sizes,
//! dense kernel tables and reward tables, and the reward bound. Kernel rows
//! are indexed by `(s_{N_i}, a_i)` with the lowest-numbered neighbor's state
//! varying fastest and the own action slowest; each row is a distribution
//! over the agent's next local state.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::InteractionGraph;
use crate::mdp::{AgentSpace, FactoredMdp, LocalKernel, LocalReward};
use crate::policy::SoftmaxPolicy;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelDoc {
    pub n: usize,
    pub r_max: f64,
    pub edges: Vec<[usize; 2]>,
    pub agents: Vec<AgentDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentDoc {
    pub states: usize,
    pub actions: usize,
    /// Rows over (s_{N_i}, a_i), each a distribution over next own state.
    pub kernel: Vec<Vec<f64>>,
    /// Indexed [s_i][a_i].
    pub reward: Vec<Vec<f64>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyDoc {
    pub agents: Vec<PolicyAgentDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PolicyAgentDoc {
    /// Logits indexed [s_i][a_i].
    pub theta: Vec<Vec<f64>>,
}

pub fn parse_model(text: &str) -> Result<FactoredMdp> {
    let doc: ModelDoc = toml::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
    build_model(doc)
}

pub fn load_model(path: &Path) -> Result<FactoredMdp> {
    parse_model(&std::fs::read_to_string(path)?)
}

fn build_model(doc: ModelDoc) -> Result<FactoredMdp> {
    if doc.agents.len() != doc.n {
        return Err(Error::ModelFile(format!(
            "n = {} but {} agent blocks given",
            doc.n,
            doc.agents.len()
        )));
    }
    let edges: Vec<(usize, usize)> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
    let graph = InteractionGraph::from_edges(doc.n, &edges)?;

    let mut spaces = Vec::with_capacity(doc.n);
    for (i, agent) in doc.agents.iter().enumerate() {
        spaces.push(AgentSpace::new(agent.states, agent.actions).map_err(|e| {
            Error::Validation {
                agent: i,
                detail: e.to_string(),
            }
        })?);
    }

    let mut kernels = Vec::with_capacity(doc.n);
    let mut rewards = Vec::with_capacity(doc.n);
    for (i, agent) in doc.agents.iter().enumerate() {
        let neighbor_states: Vec<usize> = graph
            .neighbors(i)
            .iter()
            .map(|&j| spaces[j].state_count)
            .collect();
        let expected_rows: usize = neighbor_states.iter().product::<usize>() * agent.actions;
        if agent.kernel.len() != expected_rows {
            return Err(Error::Validation {
                agent: i,
                detail: format!(
                    "kernel has {} rows, expected {expected_rows}",
                    agent.kernel.len()
                ),
            });
        }
        for (row_idx, row) in agent.kernel.iter().enumerate() {
            if row.len() != agent.states {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "kernel row {row_idx} has {} entries, expected {}",
                        row.len(),
                        agent.states
                    ),
                });
            }
        }
        let flat: Vec<f64> = agent.kernel.iter().flatten().copied().collect();
        let kernel = LocalKernel::new(&neighbor_states, agent.actions, agent.states, flat)
            .map_err(|e| Error::Validation {
                agent: i,
                detail: e.to_string(),
            })?;
        kernels.push(kernel);

        if agent.reward.len() != agent.states {
            return Err(Error::Validation {
                agent: i,
                detail: format!(
                    "reward table has {} rows, expected {}",
                    agent.reward.len(),
                    agent.states
                ),
            });
        }
        for (s, row) in agent.reward.iter().enumerate() {
            if row.len() != agent.actions {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "reward row {s} has {} entries, expected {}",
                        row.len(),
                        agent.actions
                    ),
                });
            }
        }
        let flat: Vec<f64> = agent.reward.iter().flatten().copied().collect();
        let reward =
            LocalReward::new(agent.states, agent.actions, flat, doc.r_max).map_err(|e| {
                Error::Validation {
                    agent: i,
                    detail: e.to_string(),
                }
            })?;
        rewards.push(reward);
    }

    FactoredMdp::new(graph, spaces, kernels, rewards, doc.r_max)
}

pub fn model_to_string(mdp: &FactoredMdp) -> String {
    let mut edges = Vec::new();
    for i in 0..mdp.num_agents() {
        for &j in mdp.graph().neighbors(i) {
            if j > i {
                edges.push([i, j]);
            }
        }
    }
    let agents = (0..mdp.num_agents())
        .map(|i| {
            let sp = mdp.space(i);
            let kernel = (0..mdp.kernel(i).row_count())
                .map(|r| mdp.kernel(i).row(r).to_vec())
                .collect();
            let reward = (0..sp.state_count)
                .map(|s| (0..sp.action_count).map(|a| mdp.reward(i, s, a)).collect())
                .collect();
            AgentDoc {
                states: sp.state_count,
                actions: sp.action_count,
                kernel,
                reward,
            }
        })
        .collect();
    let doc = ModelDoc {
        n: mdp.num_agents(),
        r_max: mdp.r_max(),
        edges,
        agents,
    };
    toml::to_string(&doc).expect("model serializes")
}

pub fn parse_policy(
    text: &str,
    state_counts: &[usize],
    action_counts: &[usize],
) -> Result<SoftmaxPolicy> {
    let doc: PolicyDoc = toml::from_str(text).map_err(|e| Error::ModelFile(e.to_string()))?;
    if doc.agents.len() != state_counts.len() {
        return Err(Error::ModelFile(format!(
            "policy has {} agents, model has {}",
            doc.agents.len(),
            state_counts.len()
        )));
    }
    let mut theta = Vec::with_capacity(doc.agents.len());
    for (i, agent) in doc.agents.iter().enumerate() {
        if agent.theta.len() != state_counts[i] {
            return Err(Error::Validation {
                agent: i,
                detail: format!(
                    "theta has {} rows, expected {}",
                    agent.theta.len(),
                    state_counts[i]
                ),
            });
        }
        for (s, row) in agent.theta.iter().enumerate() {
            if row.len() != action_counts[i] {
                return Err(Error::Validation {
                    agent: i,
                    detail: format!(
                        "theta row {s} has {} entries, expected {}",
                        row.len(),
                        action_counts[i]
                    ),
                });
            }
        }
        theta.push(agent.theta.iter().flatten().copied().collect());
    }
    SoftmaxPolicy::from_theta(theta, state_counts, action_counts)
}

pub fn policy_to_string(policy: &SoftmaxPolicy) -> String {
    let agents = (0..policy.num_agents())
        .map(|i| {
            let actions = policy.action_counts()[i];
            let theta = policy
                .theta(i)
                .chunks(actions)
                .map(|row| row.to_vec())
                .collect();
            PolicyAgentDoc { theta }
        })
        .collect();
    toml::to_string(&PolicyDoc { agents }).expect("policy serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const TWO_AGENT: &str = r#"
n = 2
r_max = 1.0
edges = [[0, 1]]

[[agents]]
states = 2
actions = 1
kernel = [
  [0.9, 0.1],
  [0.8, 0.2],
  [0.7, 0.3],
  [0.6, 0.4],
]
reward = [[0.0], [1.0]]

[[agents]]
states = 2
actions = 1
kernel = [
  [1.0, 0.0],
  [0.5, 0.5],
  [0.25, 0.75],
  [0.0, 1.0],
]
reward = [[0.5], [0.5]]
"#;

    #[test]
    fn round_trip() {
        let mdp = parse_model(TWO_AGENT).unwrap();
        assert_eq!(mdp.num_agents(), 2);
        assert_eq!(mdp.kernel(0).prob(&[1, 1], 0, 1).unwrap(), 0.4);
        let text = model_to_string(&mdp);
        let again = parse_model(&text).unwrap();
        assert_eq!(
            again
                .joint_transition_prob(&[1, 0], &[0, 0], &[0, 1])
                .unwrap(),
            mdp.joint_transition_prob(&[1, 0], &[0, 0], &[0, 1])
                .unwrap()
        );
    }

    #[test]
    fn bad_row_reports_agent_and_row() {
        let text = TWO_AGENT.replace("[0.7, 0.3]", "[0.7, 0.4]");
        let err = parse_model(&text).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("agent 0"), "{msg}");
        assert!(msg.contains("row 2"), "{msg}");
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = format!("{TWO_AGENT}\nextra = 1\n");
        assert!(parse_model(&text).is_err());
    }

    #[test]
    fn policy_round_trip() {
        let mut policy = SoftmaxPolicy::uniform(&[2, 2], &[3, 2]);
        policy.nudge_theta(0, 1, 2, -0.75);
        policy.nudge_theta(1, 0, 1, 1.5);
        let text = policy_to_string(&policy);
        let again = parse_policy(&text, &[2, 2], &[3, 2]).unwrap();
        assert_eq!(policy, again);
    }
}
