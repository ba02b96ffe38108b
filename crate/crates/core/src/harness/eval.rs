//! Episode evaluation driver: runs any of the four planners through the
//! shared consensus layer and logs the estimation metrics.
//!
//! Episodes are independent (per-episode RNG streams derived from the seed
//! grid), so the batch runs in parallel; rows are emitted in (seed, episode)
//! order, which keeps the CSV output byte-stable for a fixed configuration.

use super::config::{ExperimentConfig, PlannerKind};
use crate::baselines::{LmppPlanner, PsoPlanner, RwppPlanner};
use crate::env::Environment;
use crate::error::Result;
use crate::grid::{Action, Cell, NavMap};
use crate::learner::{greedy_scores, safe_consensus, QNetwork};
use crate::metrics;
use crate::par;
use crate::rng::{derive_seed, stream_rng};
use std::sync::Arc;

/// Metric snapshot at a budget checkpoint.
#[derive(Debug, Clone)]
pub struct MetricRow {
    pub seed: u64,
    pub episode: usize,
    pub step: usize,
    pub planner: PlannerKind,
    pub agents: usize,
    pub sor: f64,
    pub nsor: f64,
    /// Average/max error at ground-truth peaks; `None` marks an undefined
    /// metric (peak-free field) and prints as NA.
    pub avg_peak: Option<f64>,
    pub max_peak: Option<f64>,
    pub mean_sigma: f64,
}

#[derive(Debug, Clone)]
pub struct TraceRow {
    pub seed: u64,
    pub episode: usize,
    pub step: usize,
    pub agent: usize,
    pub row: usize,
    pub col: usize,
    pub action: String,
    pub reward: f64,
    pub sor: f64,
}

#[derive(Debug, Clone)]
pub struct EpisodeRecord {
    pub seed: u64,
    pub episode: usize,
    pub checkpoints: Vec<MetricRow>,
    pub trace: Vec<TraceRow>,
    pub final_sor: f64,
    /// (measurement count, SoR) after every step.
    pub sor_by_samples: Vec<(usize, f64)>,
    /// Smallest pairwise separation observed after any step.
    pub min_separation_m: f64,
    /// Paths per agent (starting cell first).
    pub paths: Vec<Vec<Cell>>,
}

enum Driver {
    Ddql,
    Lmpp(LmppPlanner),
    Rwpp(RwppPlanner),
    Pso(PsoPlanner),
}

/// Runs one evaluation episode under the configured planner. `net` must be
/// present for the learned policy and is evaluated greedily.
pub fn run_episode(
    map: &Arc<NavMap>,
    cfg: &ExperimentConfig,
    net: Option<&QNetwork<f32>>,
    seed: u64,
    episode: usize,
) -> Result<EpisodeRecord> {
    let global_model = cfg.planner == PlannerKind::Pso;
    let mut env = Environment::new(Arc::clone(map), cfg.env_config(global_model))?;
    let mut observations = env.reset(derive_seed(seed, "eval-episode", episode as u64))?;

    let planner_seed = derive_seed(seed, "eval-planner", episode as u64);
    let mut driver = match cfg.planner {
        PlannerKind::Ddql => {
            assert!(net.is_some(), "ddql evaluation needs a checkpoint");
            Driver::Ddql
        }
        PlannerKind::Lmpp => Driver::Lmpp(LmppPlanner::new(map, env.positions(), planner_seed)),
        PlannerKind::Rwpp => Driver::Rwpp(RwppPlanner::new(map, env.positions(), planner_seed)),
        PlannerKind::Pso => {
            let initial: Vec<(Cell, f64)> = env
                .positions()
                .iter()
                .map(|&p| Ok((p, env.ground_truth().value(map, p)?)))
                .collect::<Result<_>>()?;
            Driver::Pso(PsoPlanner::new(cfg.pso, &initial, planner_seed))
        }
    };

    let budget = cfg.budget;
    let marks = [
        (budget as f64 / 3.0).round() as usize,
        (2.0 * budget as f64 / 3.0).round() as usize,
        budget,
    ];

    let mut record = EpisodeRecord {
        seed,
        episode,
        checkpoints: Vec::new(),
        trace: Vec::new(),
        final_sor: 0.0,
        sor_by_samples: Vec::new(),
        min_separation_m: env.min_pairwise_separation_m(),
        paths: env.positions().iter().map(|&p| vec![p]).collect(),
    };

    for step in 1..=budget {
        let scores = match &mut driver {
            Driver::Ddql => greedy_scores(net.unwrap(), &observations),
            Driver::Lmpp(p) => p.scores(env.map(), env.positions()),
            Driver::Rwpp(p) => p.scores(env.map(), env.positions()),
            Driver::Pso(p) => p.scores(env.map(), env.positions(), env.model()),
        };
        let outcome = safe_consensus(env.map(), env.positions(), &scores, cfg.d_safety_m);
        let out = env.step(&outcome.actions)?;

        match &mut driver {
            Driver::Lmpp(p) => p.observe_executed(&outcome.actions),
            Driver::Rwpp(p) => p.observe_executed(&outcome.actions),
            Driver::Pso(p) => {
                let values: Vec<f64> = env
                    .positions()
                    .iter()
                    .map(|&c| env.ground_truth().value(map, c))
                    .collect::<Result<_>>()?;
                p.observe_measurements(env.positions(), &values);
            }
            Driver::Ddql => {}
        }

        let gt = env.ground_truth().values();
        let sor = metrics::sor(env.model().fused_mean(), gt)?;
        record.min_separation_m = record.min_separation_m.min(env.min_pairwise_separation_m());
        record.sor_by_samples.push((env.model().measurement_count(), sor));
        for (j, &p) in env.positions().iter().enumerate() {
            record.paths[j].push(p);
            record.trace.push(TraceRow {
                seed,
                episode,
                step,
                agent: j,
                row: p.row,
                col: p.col,
                action: outcome.actions[j].map_or("hold".to_string(), |a| a.to_string()),
                reward: out.rewards[j],
                sor,
            });
        }

        if marks.contains(&step) {
            let (avg_peak, max_peak) = match metrics::peak_errors(env.map(), env.model().fused_mean(), gt) {
                Ok((a, m)) => (Some(a), Some(m)),
                Err(_) => (None, None),
            };
            record.checkpoints.push(MetricRow {
                seed,
                episode,
                step,
                planner: cfg.planner,
                agents: cfg.agents,
                sor,
                nsor: metrics::nsor(env.model().fused_mean(), gt)?,
                avg_peak,
                max_peak,
                mean_sigma: metrics::mean(env.model().fused_std()),
            });
        }

        observations = out.observations;
        if out.done {
            break;
        }
    }

    record.final_sor = record.sor_by_samples.last().map(|&(_, s)| s).unwrap_or(0.0);
    Ok(record)
}

pub struct EvalOutputs {
    pub records: Vec<EpisodeRecord>,
    pub summary_csv: String,
    pub trace_csv: String,
}

fn na(v: Option<f64>) -> String {
    v.map_or("NA".to_string(), |x| x.to_string())
}

/// Evaluates the configured planner over the full seed x episode grid.
pub fn run_eval(cfg: &ExperimentConfig, net: Option<&QNetwork<f32>>) -> Result<EvalOutputs> {
    let map = super::load_map(cfg)?;
    let grid: Vec<(u64, usize)> = cfg
        .seeds
        .iter()
        .flat_map(|&s| (0..cfg.episodes).map(move |e| (s, e)))
        .collect();

    let results: Vec<Result<EpisodeRecord>> =
        par::map_slice(&grid, |&(seed, episode)| run_episode(&map, cfg, net, seed, episode));

    let mut records = Vec::with_capacity(results.len());
    for r in results {
        records.push(r?);
    }

    let mut summary = String::from(
        "seed,episode,step,planner,agents,sor,nsor,avg_peak_sor,max_peak_sor,mean_sigma\n",
    );
    let mut trace = String::from("seed,episode,step,agent,row,col,action,reward,sor\n");
    for rec in &records {
        for m in &rec.checkpoints {
            summary.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                m.seed,
                m.episode,
                m.step,
                m.planner,
                m.agents,
                m.sor,
                m.nsor,
                na(m.avg_peak),
                na(m.max_peak),
                m.mean_sigma
            ));
        }
        for t in &rec.trace {
            trace.push_str(&format!(
                "{},{},{},{},{},{},{},{},{}\n",
                t.seed, t.episode, t.step, t.agent, t.row, t.col, t.action, t.reward, t.sor
            ));
        }
    }

    Ok(EvalOutputs { records, summary_csv: summary, trace_csv: trace })
}

/// Final-SoR sample of an evaluation run, one value per episode.
pub fn final_sors(records: &[EpisodeRecord]) -> Vec<f64> {
    records.iter().map(|r| r.final_sor).collect()
}
