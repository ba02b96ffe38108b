//! Seeded generators for the two benchmark scalar fields and the noiseless
//! sampling interface.
//!
//! Both generators are pure functions of `(map, config)`: the WQP field is a
//! sum of random Gaussian bumps ("mountains and valleys"), the algae field is
//! rendered from surface particles that random-walk with drift for a burn-in
//! period before the mission starts. Fields are static for the whole mission
//! and normalized to `[0, 1]` (the contamination index).

use crate::error::{Error, Result};
use crate::grid::{Cell, NavMap};
use crate::rng::stream_rng;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GtKind {
    Wqp,
    Algae,
}

/// Generator parameters. Ranges are inclusive `(lo, hi)` pairs.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GtConfig {
    pub kind: GtKind,
    pub seed: u64,
    /// Number of Gaussian bumps in a WQP field.
    pub wqp_peaks: (usize, usize),
    /// Bump width (sigma) in cells.
    pub wqp_width_cells: (f64, f64),
    /// Bump amplitude before normalization.
    pub wqp_amplitude: (f64, f64),
    /// Number of particle clusters in an algae field.
    pub algae_blooms: (usize, usize),
    pub algae_particles_per_bloom: usize,
    /// Random-walk steps simulated before the mission.
    pub algae_burn_in: (usize, usize),
    /// Width of the deposition kernel used to render particle density.
    pub algae_kernel_sigma_cells: f64,
    /// Constant drift (rows, cols) in cells per burn-in step, emulating tide
    /// and wind.
    pub drift: (f64, f64),
}

impl GtConfig {
    pub fn new(kind: GtKind, seed: u64) -> Self {
        GtConfig {
            kind,
            seed,
            wqp_peaks: (3, 6),
            wqp_width_cells: (2.0, 8.0),
            wqp_amplitude: (0.3, 1.0),
            algae_blooms: (1, 3),
            algae_particles_per_bloom: 50,
            algae_burn_in: (20, 100),
            algae_kernel_sigma_cells: 1.5,
            drift: (0.2, 0.1),
        }
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        let mut cfg = self.clone();
        cfg.seed = seed;
        cfg
    }

    fn validate(&self) -> Result<()> {
        let ok = self.wqp_peaks.0 >= 1
            && self.wqp_peaks.0 <= self.wqp_peaks.1
            && self.wqp_width_cells.0 > 0.0
            && self.wqp_width_cells.0 <= self.wqp_width_cells.1
            && self.wqp_amplitude.0 > 0.0
            && self.wqp_amplitude.0 <= self.wqp_amplitude.1
            && self.algae_blooms.0 >= 1
            && self.algae_blooms.0 <= self.algae_blooms.1
            && self.algae_particles_per_bloom >= 1
            && self.algae_burn_in.0 <= self.algae_burn_in.1
            && self.algae_kernel_sigma_cells > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Config("ground-truth generator ranges are empty or invalid".into()))
        }
    }
}

/// Ground-truth values over navigable cells, indexed by [`NavMap::nav_index`].
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    kind: GtKind,
    values: Vec<f64>,
}

impl ScalarField {
    pub fn from_values(kind: GtKind, values: Vec<f64>) -> Self {
        ScalarField { kind, values }
    }

    pub fn kind(&self) -> GtKind {
        self.kind
    }

    /// Value vector over navigable cells, in `NavMap::navigable_cells` order.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, map: &NavMap, cell: Cell) -> Result<f64> {
        let idx = map
            .nav_index(cell)
            .ok_or_else(|| Error::Contract(format!("cell {cell} is not navigable")))?;
        Ok(self.values[idx])
    }

    /// CSV export: `row,col,value` per navigable cell.
    pub fn to_csv(&self, map: &NavMap) -> String {
        let mut out = String::from("row,col,value\n");
        for (i, cell) in map.navigable_cells().iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", cell.row, cell.col, self.values[i]));
        }
        out
    }
}

/// One Gaussian bump of a WQP field.
#[derive(Debug, Clone)]
pub struct Bump {
    pub center: Cell,
    pub width_cells: f64,
    pub amplitude: f64,
}

/// Generator provenance, enough to recompute the field independently.
#[derive(Debug, Clone)]
pub enum GenDetail {
    Wqp { bumps: Vec<Bump>, peak: f64 },
    Algae { particles: Vec<(f64, f64)>, kernel_sigma: f64, peak: f64 },
}

#[derive(Debug, Clone)]
pub struct GeneratedField {
    pub field: ScalarField,
    pub detail: GenDetail,
}

/// Generates the field selected by `cfg.kind`.
pub fn generate(map: &NavMap, cfg: &GtConfig) -> Result<GeneratedField> {
    match cfg.kind {
        GtKind::Wqp => gen_wqp(map, cfg),
        GtKind::Algae => gen_algae(map, cfg),
    }
}

/// Smooth field: a sum of isotropic Gaussian bumps with random centers,
/// widths and heights, max-normalized to 1.
pub fn gen_wqp(map: &NavMap, cfg: &GtConfig) -> Result<GeneratedField> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, "gt-wqp", 0);
    let cells = map.navigable_cells();

    let n = rng.gen_range(cfg.wqp_peaks.0..=cfg.wqp_peaks.1);
    let mut bumps = Vec::with_capacity(n);
    for _ in 0..n {
        let center = cells[rng.gen_range(0..cells.len())];
        let width_cells = rng.gen_range(cfg.wqp_width_cells.0..=cfg.wqp_width_cells.1);
        let amplitude = rng.gen_range(cfg.wqp_amplitude.0..=cfg.wqp_amplitude.1);
        bumps.push(Bump { center, width_cells, amplitude });
    }

    let mut values: Vec<f64> = cells
        .iter()
        .map(|&cell| {
            bumps
                .iter()
                .map(|b| {
                    let dr = cell.row as f64 - b.center.row as f64;
                    let dc = cell.col as f64 - b.center.col as f64;
                    let d2 = dr * dr + dc * dc;
                    b.amplitude * (-d2 / (2.0 * b.width_cells * b.width_cells)).exp()
                })
                .sum()
        })
        .collect();
    let peak = normalize(&mut values);

    Ok(GeneratedField {
        field: ScalarField::from_values(GtKind::Wqp, values),
        detail: GenDetail::Wqp { bumps, peak },
    })
}

/// Localized field: clusters of surface particles random-walk with drift for
/// a burn-in period (reflecting at land), then a Gaussian deposition kernel
/// renders their density, max-normalized to 1.
pub fn gen_algae(map: &NavMap, cfg: &GtConfig) -> Result<GeneratedField> {
    cfg.validate()?;
    let mut rng = stream_rng(cfg.seed, "gt-algae", 0);
    let cells = map.navigable_cells();

    let blooms = rng.gen_range(cfg.algae_blooms.0..=cfg.algae_blooms.1);
    let burn_in = rng.gen_range(cfg.algae_burn_in.0..=cfg.algae_burn_in.1);

    let mut particles = Vec::with_capacity(blooms * cfg.algae_particles_per_bloom);
    for _ in 0..blooms {
        let seed_cell = cells[rng.gen_range(0..cells.len())];
        for _ in 0..cfg.algae_particles_per_bloom {
            particles.push((seed_cell.row as f64, seed_cell.col as f64));
        }
    }

    let navigable_pos = |r: f64, c: f64| -> bool {
        if r < -0.5 || c < -0.5 {
            return false;
        }
        let cell = Cell::new(r.round().max(0.0) as usize, c.round().max(0.0) as usize);
        map.is_navigable(cell)
    };

    for _ in 0..burn_in {
        for p in particles.iter_mut() {
            let sr: f64 = StandardNormal.sample(&mut rng);
            let sc: f64 = StandardNormal.sample(&mut rng);
            let step = (sr + cfg.drift.0, sc + cfg.drift.1);
            // reflect at land: mirror the offending axis, else hold position
            let candidates = [
                (p.0 + step.0, p.1 + step.1),
                (p.0 - step.0, p.1 + step.1),
                (p.0 + step.0, p.1 - step.1),
                (p.0 - step.0, p.1 - step.1),
            ];
            if let Some(&next) = candidates.iter().find(|(r, c)| navigable_pos(*r, *c)) {
                *p = next;
            }
        }
    }

    let sigma = cfg.algae_kernel_sigma_cells;
    let mut values: Vec<f64> = cells
        .iter()
        .map(|&cell| {
            particles
                .iter()
                .map(|&(pr, pc)| {
                    let dr = cell.row as f64 - pr;
                    let dc = cell.col as f64 - pc;
                    (-(dr * dr + dc * dc) / (2.0 * sigma * sigma)).exp()
                })
                .sum()
        })
        .collect();
    let peak = normalize(&mut values);

    Ok(GeneratedField {
        field: ScalarField::from_values(GtKind::Algae, values),
        detail: GenDetail::Algae { particles, kernel_sigma: sigma, peak },
    })
}

/// Divides by the max and clips to [0, 1]; returns the pre-normalization peak.
fn normalize(values: &mut [f64]) -> f64 {
    let peak = values.iter().cloned().fold(0.0f64, f64::max);
    if peak > 0.0 {
        for v in values.iter_mut() {
            *v = (*v / peak).clamp(0.0, 1.0);
        }
    }
    peak
}
