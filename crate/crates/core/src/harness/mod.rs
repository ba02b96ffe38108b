//! Experiment orchestration: configuration, evaluation, the local-vs-global
//! GP benchmark, rendering, statistics and the self-test battery.

pub mod config;
pub mod eval;
pub mod gpbench;
pub mod render;
pub mod selftest;
pub mod stats;

pub use config::{ExperimentConfig, PlannerKind};
pub use eval::{final_sors, run_episode, run_eval, EpisodeRecord, EvalOutputs, MetricRow};
pub use gpbench::{gp_bench, log_log_slope, GpBenchOutputs, GpBenchRow};
pub use stats::{rank_sum_test, RankSumResult};

use crate::env::Environment;
use crate::error::Result;
use crate::grid::NavMap;
use crate::learner::{self, QNetwork, QNetworkSpec};
use std::path::Path;
use std::sync::Arc;

/// Loads the configured map, falling back to the bundled lake.
pub fn load_map(cfg: &ExperimentConfig) -> Result<Arc<NavMap>> {
    match &cfg.map {
        Some(path) => {
            let text = std::fs::read_to_string(path)?;
            Ok(Arc::new(NavMap::parse(&text)?))
        }
        None => Ok(Arc::new(NavMap::default_map().clone())),
    }
}

/// Training entry point: drives the learner on the configured environment,
/// writing the per-episode log CSV and the final checkpoint into `cfg.out`.
pub fn train(cfg: &ExperimentConfig) -> Result<learner::TrainOutcome> {
    let map = load_map(cfg)?;
    let mut env = Environment::new(Arc::clone(&map), cfg.env_config(false))?;
    let spec = QNetworkSpec::for_input(map.height(), map.width());
    let train_cfg = cfg.train_config();

    std::fs::create_dir_all(&cfg.out)?;
    let log_path = cfg.out.join("training_log.csv");
    let mut log =
        String::from("episode,epsilon,mean_reward,final_sor,loss_mean,loss_last,null_actions\n");

    let outcome = learner::run_training(&mut env, spec, &train_cfg, |row| {
        log.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            row.episode,
            row.epsilon,
            row.mean_reward,
            row.final_sor,
            row.loss_mean,
            row.loss_last,
            row.null_actions
        ));
    })?;

    std::fs::write(&log_path, &log)?;
    let ckpt = cfg
        .checkpoint
        .clone()
        .unwrap_or_else(|| cfg.out.join("policy.ckpt"));
    learner::checkpoint::save(&ckpt, &outcome.net)?;
    Ok(outcome)
}

/// Loads the checkpoint named by the config for the map-sized network.
pub fn load_policy(cfg: &ExperimentConfig, map: &NavMap) -> Result<QNetwork<f32>> {
    let path = cfg.checkpoint.as_ref().ok_or_else(|| {
        crate::error::Error::Config("planner 'ddql' needs --checkpoint <path>".into())
    })?;
    let spec = QNetworkSpec::for_input(map.height(), map.width());
    learner::checkpoint::load(path, &spec)
}

/// Writes text to `dir/name`, creating the directory first.
pub fn write_text(dir: &Path, name: &str, contents: &str) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), contents)?;
    Ok(())
}
