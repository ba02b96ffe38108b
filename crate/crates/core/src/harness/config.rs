//! Experiment configuration: a flat, human-editable TOML file. Every key has
//! a default, so an empty file (or none at all) is a valid configuration;
//! command-line flags override loaded values.

use crate::baselines::PsoCoefficients;
use crate::env::{EnvConfig, RewardKind};
use crate::error::{Error, Result};
use crate::groundtruth::{GtConfig, GtKind};
use crate::learner::{OptimizerKind, TrainConfig};
use crate::localgp::ModelConfig;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlannerKind {
    Ddql,
    Lmpp,
    Rwpp,
    Pso,
}

impl std::fmt::Display for PlannerKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            PlannerKind::Ddql => "ddql",
            PlannerKind::Lmpp => "lmpp",
            PlannerKind::Rwpp => "rwpp",
            PlannerKind::Pso => "pso",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for PlannerKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ddql" => Ok(PlannerKind::Ddql),
            "lmpp" => Ok(PlannerKind::Lmpp),
            "rwpp" => Ok(PlannerKind::Rwpp),
            "pso" => Ok(PlannerKind::Pso),
            other => Err(Error::Config(format!("unknown planner '{other}'"))),
        }
    }
}

fn default_agents() -> usize {
    3
}
fn default_episodes() -> usize {
    50
}
fn default_seeds() -> Vec<u64> {
    vec![0, 1, 2, 3, 4, 5]
}
fn default_out() -> PathBuf {
    PathBuf::from("out")
}
fn default_budget() -> usize {
    50
}
fn default_d_safety() -> f64 {
    300.0
}
fn default_spacing() -> f64 {
    2000.0
}
fn default_radius() -> f64 {
    1450.0
}
fn default_l_min() -> f64 {
    0.5
}
fn default_l_max() -> f64 {
    10.0
}
fn default_sigma0() -> f64 {
    1.0
}
fn default_noise() -> f64 {
    1e-5
}
fn default_gt() -> GtKind {
    GtKind::Wqp
}
fn default_planner() -> PlannerKind {
    PlannerKind::Rwpp
}
fn default_reward() -> RewardKind {
    RewardKind::DeltaMu
}
fn default_lr() -> f64 {
    1e-4
}
fn default_batch() -> usize {
    64
}
fn default_gamma() -> f64 {
    0.99
}
fn default_tau() -> f64 {
    1e-4
}
fn default_eps_min() -> f64 {
    0.05
}
fn default_buffer() -> usize {
    50_000
}
fn default_optimizer() -> OptimizerKind {
    OptimizerKind::Sgd
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Map file path; the bundled lake when absent.
    #[serde(default)]
    pub map: Option<PathBuf>,
    #[serde(default = "default_gt")]
    pub gt: GtKind,
    #[serde(default = "default_agents")]
    pub agents: usize,
    #[serde(default = "default_planner")]
    pub planner: PlannerKind,
    #[serde(default = "default_reward")]
    pub reward: RewardKind,
    /// Episodes per seed in evaluation; training episodes for `train`.
    #[serde(default = "default_episodes")]
    pub episodes: usize,
    /// Evaluation seed grid.
    #[serde(default = "default_seeds")]
    pub seeds: Vec<u64>,
    /// Master seed for training.
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    #[serde(default)]
    pub checkpoint: Option<PathBuf>,

    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_d_safety")]
    pub d_safety_m: f64,
    #[serde(default = "default_spacing")]
    pub layout_spacing_m: f64,
    /// Influence radius nu_k; the reward disk follows it.
    #[serde(default = "default_radius")]
    pub influence_radius_m: f64,
    #[serde(default = "default_l_min")]
    pub lengthscale_min: f64,
    #[serde(default = "default_l_max")]
    pub lengthscale_max: f64,
    #[serde(default = "default_sigma0")]
    pub sigma0: f64,
    #[serde(default = "default_noise")]
    pub noise: f64,
    /// Restrict fusion weights to covering GPs (comparison variant).
    #[serde(default)]
    pub restrict_fusion_weights: bool,

    #[serde(default)]
    pub pso: PsoCoefficients,

    // learner hyperparameters
    #[serde(default = "default_lr")]
    pub lr: f64,
    #[serde(default = "default_batch")]
    pub batch: usize,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_tau")]
    pub tau: f64,
    #[serde(default = "default_eps_min")]
    pub eps_min: f64,
    /// Per-episode epsilon decrement; derived from the episode count when
    /// absent so the schedule bottoms out halfway through training.
    #[serde(default)]
    pub eps_decay: Option<f64>,
    #[serde(default = "default_buffer")]
    pub buffer_capacity: usize,
    #[serde(default = "default_optimizer")]
    pub optimizer: OptimizerKind,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        toml::from_str("").expect("empty config is valid")
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn gt_config(&self) -> GtConfig {
        GtConfig::new(self.gt, self.seed)
    }

    pub fn model_config(&self) -> ModelConfig {
        ModelConfig {
            lengthscale_bounds: (self.lengthscale_min, self.lengthscale_max),
            sigma0: self.sigma0,
            noise: self.noise,
            restrict_weights_to_covering: self.restrict_fusion_weights,
        }
    }

    /// Environment configuration; `global_model` swaps the local bank for a
    /// single unbounded GP (the PSO baseline's estimation model).
    pub fn env_config(&self, global_model: bool) -> EnvConfig {
        EnvConfig {
            n_agents: self.agents,
            gt: self.gt_config(),
            reward: self.reward,
            budget: self.budget,
            d_safety_m: self.d_safety_m,
            layout_spacing_m: self.layout_spacing_m,
            influence_radius_m: self.influence_radius_m,
            model: self.model_config(),
            use_global_model: global_model,
        }
    }

    pub fn train_config(&self) -> TrainConfig {
        let mut t = TrainConfig::for_episodes(self.episodes);
        t.lr = self.lr;
        t.batch = self.batch;
        t.gamma = self.gamma;
        t.tau = self.tau;
        t.eps_min = self.eps_min;
        if let Some(d) = self.eps_decay {
            t.eps_decay = d;
        }
        t.buffer_capacity = self.buffer_capacity;
        t.seed = self.seed;
        t.optimizer = self.optimizer;
        t
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_config_gets_defaults() {
        let cfg = ExperimentConfig::default();
        assert_eq!(cfg.agents, 3);
        assert_eq!(cfg.budget, 50);
        assert_eq!(cfg.d_safety_m, 300.0);
        assert_eq!(cfg.influence_radius_m, 1450.0);
        assert_eq!(cfg.lengthscale_min, 0.5);
        assert_eq!(cfg.lengthscale_max, 10.0);
        assert_eq!(cfg.seeds.len(), 6);
    }

    #[test]
    fn roundtrips_through_toml() {
        let mut cfg = ExperimentConfig::default();
        cfg.agents = 2;
        cfg.gt = GtKind::Algae;
        cfg.planner = PlannerKind::Pso;
        let text = cfg.to_toml();
        let back: ExperimentConfig = toml::from_str(&text).unwrap();
        assert_eq!(back.agents, 2);
        assert_eq!(back.gt, GtKind::Algae);
        assert_eq!(back.planner, PlannerKind::Pso);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        let r: std::result::Result<ExperimentConfig, _> = toml::from_str("no_such_key = 1");
        assert!(r.is_err());
    }
}
