//! Command-line interface for the fleet simulator: training, evaluation, the
//! GP benchmark, rendering and self-tests.
//!
//! `IPP_FLEET_THREADS` bounds the worker-thread count. Exit code is 0 on
//! success and nonzero with a one-line reason otherwise.

use anyhow::{anyhow, Context, Result};
use clap::{Args, Parser, Subcommand};
use ipp_core::env::RewardKind;
use ipp_core::groundtruth::GtKind;
use ipp_core::harness::{self, ExperimentConfig, PlannerKind};
use ipp_core::metrics;
use ipp_core::par;
use std::path::PathBuf;

#[derive(Parser)]
#[command(name = "ipp-fleet", version, about = "Multi-agent informative path planning over lake scenarios")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML configuration file; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed; also collapses the evaluation seed grid to this seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Planner: ddql | lmpp | rwpp | pso.
    #[arg(long)]
    planner: Option<String>,
    /// Fleet size.
    #[arg(long)]
    agents: Option<usize>,
    /// Ground truth: wqp | algae.
    #[arg(long)]
    gt: Option<String>,
    /// Reward: mu | sigma.
    #[arg(long)]
    reward: Option<String>,
    /// Policy checkpoint (required for planner ddql).
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Episode count (per seed for eval; total for train).
    #[arg(long)]
    episodes: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Train the safe dueling double Q-policy and save a checkpoint.
    Train(Overrides),
    /// Evaluate a planner over the seed grid, writing metric CSVs.
    Eval(Overrides),
    /// Compare local and global GP models on identical sample streams.
    GpBench(Overrides),
    /// Render ground truth, model surfaces and the fleet paths as images.
    Render(Overrides),
    /// Run the embedded oracle checks.
    Selftest,
}

fn build_config(o: &Overrides) -> Result<ExperimentConfig> {
    let mut cfg = match &o.config {
        Some(path) => ExperimentConfig::load(path)
            .with_context(|| format!("loading {}", path.display()))?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = o.seed {
        cfg.seed = seed;
        cfg.seeds = vec![seed];
    }
    if let Some(out) = &o.out {
        cfg.out = out.clone();
    }
    if let Some(p) = &o.planner {
        cfg.planner = p.parse()?;
    }
    if let Some(a) = o.agents {
        cfg.agents = a;
    }
    if let Some(gt) = &o.gt {
        cfg.gt = match gt.as_str() {
            "wqp" => GtKind::Wqp,
            "algae" => GtKind::Algae,
            other => return Err(anyhow!("unknown ground truth '{other}' (wqp|algae)")),
        };
    }
    if let Some(r) = &o.reward {
        cfg.reward = match r.as_str() {
            "mu" => RewardKind::DeltaMu,
            "sigma" => RewardKind::DeltaSigma,
            other => return Err(anyhow!("unknown reward '{other}' (mu|sigma)")),
        };
    }
    if let Some(c) = &o.checkpoint {
        cfg.checkpoint = Some(c.clone());
    }
    if let Some(e) = o.episodes {
        cfg.episodes = e;
    }
    Ok(cfg)
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}

fn run() -> Result<()> {
    par::init_threads_from_env();
    match Cli::parse().command {
        Command::Train(o) => {
            let cfg = build_config(&o)?;
            let outcome = harness::train(&cfg)?;
            let ckpt = cfg
                .checkpoint
                .clone()
                .unwrap_or_else(|| cfg.out.join("policy.ckpt"));
            let tail: Vec<f64> = outcome
                .logs
                .iter()
                .rev()
                .take(10)
                .map(|l| l.final_sor)
                .collect();
            println!(
                "trained {} episodes; mean final SoR over last {}: {:.3}; checkpoint: {}",
                outcome.logs.len(),
                tail.len(),
                metrics::mean(&tail),
                ckpt.display()
            );
        }
        Command::Eval(o) => {
            let cfg = build_config(&o)?;
            let map = harness::load_map(&cfg)?;
            let net = if cfg.planner == PlannerKind::Ddql {
                Some(harness::load_policy(&cfg, &map)?)
            } else {
                None
            };
            let out = harness::run_eval(&cfg, net.as_ref())?;
            harness::write_text(&cfg.out, "results.csv", &out.summary_csv)?;
            harness::write_text(&cfg.out, "trace.csv", &out.trace_csv)?;
            let finals = harness::final_sors(&out.records);
            println!(
                "{} episodes ({} planner, {} agents); mean final SoR {:.3}; results in {}",
                out.records.len(),
                cfg.planner,
                cfg.agents,
                metrics::mean(&finals),
                cfg.out.display()
            );
        }
        Command::GpBench(o) => {
            let cfg = build_config(&o)?;
            let out = harness::gp_bench(&cfg)?;
            harness::write_text(&cfg.out, "gp_bench_error.csv", &out.error_csv)?;
            harness::write_text(&cfg.out, "gp_bench_time.csv", &out.time_csv)?;
            let last_local = out.rows.last().map(|r| r.sor_local).unwrap_or(f64::NAN);
            let last_global = out.rows.last().map(|r| r.sor_global).unwrap_or(f64::NAN);
            println!(
                "{} missions; last-mission final SoR local {:.3} vs global {:.3}; CSVs in {}",
                cfg.episodes,
                last_local,
                last_global,
                cfg.out.display()
            );
        }
        Command::Render(o) => {
            let cfg = build_config(&o)?;
            let map = harness::load_map(&cfg)?;
            let net = if cfg.planner == PlannerKind::Ddql {
                Some(harness::load_policy(&cfg, &map)?)
            } else {
                None
            };
            let written = ipp_core::harness::render::render(&cfg, net.as_ref())?;
            for p in written {
                println!("{}", p.display());
            }
        }
        Command::Selftest => {
            harness::selftest::run()?;
        }
    }
    Ok(())
}
