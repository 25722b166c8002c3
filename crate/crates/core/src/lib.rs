//! Average-reward multi-agent reinforcement learning on networks.
//!
//! The crate has four parts:
//!
//! - model types: [`graph::InteractionGraph`], [`mdp::FactoredMdp`],
//!   [`policy::SoftmaxPolicy`] and the flat-index plumbing in [`index`];
//! - [`oracle`]: brute-force / linear-algebra computation of stationary
//!   distributions, Q-functions, policy gradients, interaction matrices,
//!   decay profiles and critic fixed points on small instances;
//! - [`sac`]: the two-timescale scalable actor-critic trainer running on a
//!   single trajectory with truncated per-agent Q tables;
//! - [`envs`]: the wireless multi-access environment with an ALOHA
//!   baseline, plus random instance generators.

pub mod envs;
pub mod error;
pub mod graph;
pub mod index;
pub mod mdp;
pub mod model_file;
pub mod oracle;
pub mod policy;
pub mod sac;
pub mod seed;

pub use error::{Error, Result};
