//! Local-vs-global GP comparison on identical sample streams.
//!
//! Random-wanderer fleets collect samples; both models ingest the same
//! stream, and the run logs the estimation error per sample count plus the
//! cumulative model-update time for each side. Error curves are
//! deterministic; timings go to a separate file since wall-clock values
//! never reproduce byte-for-byte.

use super::config::ExperimentConfig;
use crate::baselines::RwppPlanner;
use crate::env::place_fleet;
use crate::error::Result;
use crate::grid::Cell;
use crate::groundtruth::generate;
use crate::learner::safe_consensus;
use crate::localgp::{LocalGpModel, LocalLayout};
use crate::metrics;
use crate::rng::{derive_seed, stream_rng};
use std::time::Instant;

#[derive(Debug, Clone)]
pub struct GpBenchRow {
    pub mission: usize,
    pub step: usize,
    pub samples: usize,
    pub sor_local: f64,
    pub sor_global: f64,
    pub cum_time_local_s: f64,
    pub cum_time_global_s: f64,
}

pub struct GpBenchOutputs {
    pub rows: Vec<GpBenchRow>,
    /// mission,step,samples,sor_local,sor_global — byte-stable.
    pub error_csv: String,
    /// mission,step,samples,time_local_s,time_global_s — wall-clock, not
    /// byte-stable across runs.
    pub time_csv: String,
}

/// Runs `cfg.episodes` missions of `cfg.agents` random wanderers, fitting a
/// local bank and a single global GP on the same sample streams.
pub fn gp_bench(cfg: &ExperimentConfig) -> Result<GpBenchOutputs> {
    let map = super::load_map(cfg)?;
    let mut rows = Vec::new();

    // missions run sequentially so per-model timings stay uncontended
    for mission in 0..cfg.episodes {
        let seed = cfg.seeds.first().copied().unwrap_or(0);
        let gt_cfg = cfg
            .gt_config()
            .with_seed(derive_seed(seed, "gp-bench-gt", mission as u64));
        let gt = generate(&map, &gt_cfg)?.field;

        let mut rng = stream_rng(seed, "gp-bench-place", mission as u64);
        let mut positions = place_fleet(&map, cfg.agents, cfg.d_safety_m, &mut rng)?;

        let layout = LocalLayout::build(&map, cfg.layout_spacing_m, cfg.influence_radius_m)?;
        let mut local = LocalGpModel::new(&map, layout, cfg.model_config());
        let mut global = LocalGpModel::global(&map, cfg.model_config());
        let mut t_local = 0.0f64;
        let mut t_global = 0.0f64;

        let mut ingest = |batch: &[(Cell, f64)],
                          local: &mut LocalGpModel,
                          global: &mut LocalGpModel|
         -> Result<(f64, f64)> {
            let t = Instant::now();
            local.add_samples(&map, batch)?;
            t_local += t.elapsed().as_secs_f64();
            let t = Instant::now();
            global.add_samples(&map, batch)?;
            t_global += t.elapsed().as_secs_f64();
            Ok((t_local, t_global))
        };

        let initial: Vec<(Cell, f64)> = positions
            .iter()
            .map(|&p| Ok((p, gt.value(&map, p)?)))
            .collect::<Result<_>>()?;
        ingest(&initial, &mut local, &mut global)?;

        let mut planner = RwppPlanner::new(
            &map,
            &positions,
            derive_seed(seed, "gp-bench-planner", mission as u64),
        );
        for step in 1..=cfg.budget {
            let scores = planner.scores(&map, &positions);
            let outcome = safe_consensus(&map, &positions, &scores, cfg.d_safety_m);
            planner.observe_executed(&outcome.actions);
            positions = outcome.next_positions;

            let batch: Vec<(Cell, f64)> = positions
                .iter()
                .map(|&p| Ok((p, gt.value(&map, p)?)))
                .collect::<Result<_>>()?;
            let (cl, cg) = ingest(&batch, &mut local, &mut global)?;

            rows.push(GpBenchRow {
                mission,
                step,
                samples: local.measurement_count(),
                sor_local: metrics::sor(local.fused_mean(), gt.values())?,
                sor_global: metrics::sor(global.fused_mean(), gt.values())?,
                cum_time_local_s: cl,
                cum_time_global_s: cg,
            });
        }
    }

    let mut error_csv = String::from("mission,step,samples,sor_local,sor_global\n");
    let mut time_csv = String::from("mission,step,samples,time_local_s,time_global_s\n");
    for r in &rows {
        error_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.mission, r.step, r.samples, r.sor_local, r.sor_global
        ));
        time_csv.push_str(&format!(
            "{},{},{},{},{}\n",
            r.mission, r.step, r.samples, r.cum_time_local_s, r.cum_time_global_s
        ));
    }

    Ok(GpBenchOutputs { rows, error_csv, time_csv })
}

/// Least-squares slope of `ln(y)` against `ln(x)`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|&&(x, y)| x > 0.0 && y > 0.0)
        .map(|&(x, y)| (x.ln(), y.ln()))
        .collect();
    let n = pts.len() as f64;
    assert!(n >= 2.0, "need at least two positive points");
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let cov: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let var: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    cov / var
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groundtruth::GtKind;

    #[test]
    fn bench_rows_cover_missions_and_steps() {
        let mut cfg = ExperimentConfig::default();
        cfg.gt = GtKind::Algae;
        cfg.agents = 3;
        cfg.episodes = 2;
        cfg.budget = 8;
        let out = gp_bench(&cfg).unwrap();
        assert_eq!(out.rows.len(), 2 * 8);
        let last = out.rows.last().unwrap();
        assert_eq!(last.samples, 3 * 9); // initial + 8 steps, 3 agents
        assert!(out.rows.iter().all(|r| r.cum_time_local_s > 0.0));
        assert!(out.rows.iter().all(|r| r.sor_local.is_finite() && r.sor_global.is_finite()));
    }

    #[test]
    fn error_curves_are_deterministic() {
        let mut cfg = ExperimentConfig::default();
        cfg.gt = GtKind::Algae;
        cfg.episodes = 1;
        cfg.budget = 5;
        let a = gp_bench(&cfg).unwrap();
        let b = gp_bench(&cfg).unwrap();
        assert_eq!(a.error_csv, b.error_csv);
    }

    #[test]
    fn slope_of_a_power_law_is_its_exponent() {
        let pts: Vec<(f64, f64)> = (1..50).map(|i| (i as f64, (i as f64).powi(3) * 2.0)).collect();
        assert!((log_log_slope(&pts) - 3.0).abs() < 1e-9);
    }
}
