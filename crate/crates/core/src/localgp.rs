//! Bank of local Gaussian processes with distance-weighted fusion.
//!
//! Each local GP owns a centroid and an influence disk of radius `nu`. A
//! sample is routed to every GP whose disk contains it, so overlapping disks
//! share data and stay mutually consistent. Every routed GP refits its
//! lengthscale, and the per-GP posteriors are fused into global mean and
//! uncertainty surfaces with weights `exp(-||x - c_k||)` (distance in cell
//! units) over all K processes; a GP without samples contributes its prior.
//!
//! Refits of distinct GPs after a routing step are independent and run in
//! parallel; fusing the surfaces is the barrier afterwards.

use crate::error::{Error, Result};
use crate::gp::{fit_lengthscale, GpSolver, KernelParams, SampleSet};
use crate::grid::{Cell, NavMap};
use crate::par;

/// Centroid layout of the local GP bank.
#[derive(Debug, Clone)]
pub struct LocalLayout {
    centroids: Vec<Cell>,
    radius_m: f64,
}

/// Hard cap on layout size; repairs beyond this indicate a degenerate
/// spacing/radius configuration.
const MAX_CENTROIDS: usize = 4096;

impl LocalLayout {
    /// Lays centroids on a centered rectangular lattice at `spacing_m`,
    /// snapping each lattice point within `radius_m` of water to its nearest
    /// navigable cell, then greedily adds centroids at the worst-covered
    /// cells until every navigable cell lies within `radius_m` of some
    /// centroid.
    pub fn build(map: &NavMap, spacing_m: f64, radius_m: f64) -> Result<Self> {
        if !(spacing_m > 0.0) || !(radius_m > 0.0) {
            return Err(Error::Config("layout spacing and radius must be positive".into()));
        }
        let step = (spacing_m / map.cell_size_m()).round().max(1.0) as usize;
        let r0 = ((map.height() - 1) % step) / 2;
        let c0 = ((map.width() - 1) % step) / 2;

        let mut centroids: Vec<Cell> = Vec::new();
        for r in (r0..map.height()).step_by(step) {
            for c in (c0..map.width()).step_by(step) {
                let anchor = Cell::new(r, c);
                let nearest = nearest_navigable(map, anchor);
                if map.distance_m(anchor, nearest) <= radius_m && !centroids.contains(&nearest) {
                    centroids.push(nearest);
                }
            }
        }

        // coverage repair, farthest uncovered cell first
        loop {
            let mut worst: Option<(f64, Cell)> = None;
            for &cell in map.navigable_cells() {
                let d = centroids
                    .iter()
                    .map(|&c| map.distance_m(cell, c))
                    .fold(f64::INFINITY, f64::min);
                if d > radius_m && worst.map_or(true, |(wd, _)| d > wd) {
                    worst = Some((d, cell));
                }
            }
            match worst {
                Some((_, cell)) => {
                    centroids.push(cell);
                    if centroids.len() > MAX_CENTROIDS {
                        return Err(Error::Config(format!(
                            "coverage repair exceeded {MAX_CENTROIDS} centroids; \
                             spacing {spacing_m} m / radius {radius_m} m do not fit this map"
                        )));
                    }
                }
                None => break,
            }
        }

        Ok(LocalLayout { centroids, radius_m })
    }

    /// A layout from explicit centroids (tests and special setups).
    pub fn from_centroids(centroids: Vec<Cell>, radius_m: f64) -> Result<Self> {
        if centroids.is_empty() {
            return Err(Error::Config("layout needs at least one centroid".into()));
        }
        Ok(LocalLayout { centroids, radius_m })
    }

    /// Single global GP: one centroid at the map center, unbounded radius.
    pub fn global(map: &NavMap) -> Self {
        let center = Cell::new((map.height() - 1) / 2, (map.width() - 1) / 2);
        LocalLayout {
            centroids: vec![nearest_navigable(map, center)],
            radius_m: f64::INFINITY,
        }
    }

    pub fn centroids(&self) -> &[Cell] {
        &self.centroids
    }

    pub fn count(&self) -> usize {
        self.centroids.len()
    }

    pub fn radius_m(&self) -> f64 {
        self.radius_m
    }

    /// True when every navigable cell lies in at least one influence disk.
    pub fn covers(&self, map: &NavMap) -> bool {
        map.navigable_cells().iter().all(|&cell| {
            self.centroids
                .iter()
                .any(|&c| map.distance_m(cell, c) <= self.radius_m)
        })
    }
}

fn nearest_navigable(map: &NavMap, anchor: Cell) -> Cell {
    let mut best = map.navigable_cells()[0];
    let mut best_d = map.distance_m(anchor, best);
    for &cell in map.navigable_cells() {
        let d = map.distance_m(anchor, cell);
        if d < best_d {
            best = cell;
            best_d = d;
        }
    }
    best
}

/// Hyperparameters shared by every GP in the bank.
#[derive(Debug, Clone, Copy)]
pub struct ModelConfig {
    /// Lengthscale interval for the per-GP fits.
    pub lengthscale_bounds: (f64, f64),
    /// Prior amplitude sigma_0.
    pub sigma0: f64,
    /// Measurement noise sigma_n (numerical jitter; sampling is noiseless).
    pub noise: f64,
    /// Restrict fusion weights to GPs whose disk covers the query instead of
    /// the full sum over all K.
    pub restrict_weights_to_covering: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            lengthscale_bounds: (0.5, 10.0),
            sigma0: 1.0,
            noise: 1e-5,
            restrict_weights_to_covering: false,
        }
    }
}

#[derive(Debug, Clone)]
struct LocalGp {
    samples: SampleSet,
    params: KernelParams,
    fallback: bool,
    /// Posterior mean over all navigable cells; `None` while the GP is empty
    /// (prior: mean 0, std sigma_0).
    mean: Option<Vec<f64>>,
    std: Option<Vec<f64>>,
}

/// The fused model: K local GPs plus the fused mean/uncertainty surfaces
/// over all navigable cells.
#[derive(Debug, Clone)]
pub struct LocalGpModel {
    layout: LocalLayout,
    cfg: ModelConfig,
    gps: Vec<LocalGp>,
    /// Fusion weights, `weights[k * ncells + i] = exp(-dist(cell_i, c_k))`.
    weights: Vec<f64>,
    /// Covering mask for the restricted-weights variant.
    covering: Vec<bool>,
    ncells: usize,
    fused_mean: Vec<f64>,
    fused_std: Vec<f64>,
    measurements: usize,
}

impl LocalGpModel {
    pub fn new(map: &NavMap, layout: LocalLayout, cfg: ModelConfig) -> Self {
        let ncells = map.navigable_count();
        let k = layout.count();
        let mut weights = vec![0.0; k * ncells];
        let mut covering = vec![false; k * ncells];
        for (kk, &c) in layout.centroids().iter().enumerate() {
            for (i, &cell) in map.navigable_cells().iter().enumerate() {
                let dist_m = map.distance_m(cell, c);
                weights[kk * ncells + i] = (-(dist_m / map.cell_size_m())).exp();
                covering[kk * ncells + i] = dist_m <= layout.radius_m();
            }
        }
        let init = KernelParams::new(cfg.sigma0, cfg.lengthscale_bounds.1);
        let gps = vec![
            LocalGp {
                samples: SampleSet::new(),
                params: init,
                fallback: false,
                mean: None,
                std: None,
            };
            k
        ];
        let mut model = LocalGpModel {
            layout,
            cfg,
            gps,
            weights,
            covering,
            ncells,
            fused_mean: vec![0.0; ncells],
            fused_std: vec![cfg.sigma0; ncells],
            measurements: 0,
        };
        model.refresh_fusion();
        model
    }

    /// Convenience: the K = 1 infinite-radius model (a plain global GP).
    pub fn global(map: &NavMap, cfg: ModelConfig) -> Self {
        LocalGpModel::new(map, LocalLayout::global(map), cfg)
    }

    pub fn layout(&self) -> &LocalLayout {
        &self.layout
    }

    pub fn config(&self) -> &ModelConfig {
        &self.cfg
    }

    pub fn gp_count(&self) -> usize {
        self.gps.len()
    }

    pub fn gp_samples(&self, k: usize) -> &SampleSet {
        &self.gps[k].samples
    }

    pub fn gp_params(&self, k: usize) -> KernelParams {
        self.gps[k].params
    }

    pub fn gp_fit_fell_back(&self, k: usize) -> bool {
        self.gps[k].fallback
    }

    fn gp_mean_at(&self, k: usize, i: usize) -> f64 {
        self.gps[k].mean.as_ref().map_or(0.0, |m| m[i])
    }

    fn gp_std_at(&self, k: usize, i: usize) -> f64 {
        self.gps[k].std.as_ref().map_or(self.cfg.sigma0, |s| s[i])
    }

    /// Measurements routed into the model so far (each sample counted once,
    /// however many disks it landed in).
    pub fn measurement_count(&self) -> usize {
        self.measurements
    }

    pub fn fused_mean(&self) -> &[f64] {
        &self.fused_mean
    }

    pub fn fused_std(&self) -> &[f64] {
        &self.fused_std
    }

    /// Routes one sample; see [`LocalGpModel::add_samples`].
    pub fn add_sample(&mut self, map: &NavMap, x: Cell, y: f64) -> Result<()> {
        self.add_samples(map, &[(x, y)])
    }

    /// Routes a batch of samples to every GP whose disk contains them, refits
    /// each touched GP once, and recomputes the fused surfaces.
    pub fn add_samples(&mut self, map: &NavMap, batch: &[(Cell, f64)]) -> Result<()> {
        if batch.is_empty() {
            return Ok(());
        }
        let mut touched = Vec::new();
        for &(x, y) in batch {
            if !map.is_navigable(x) {
                return Err(Error::Contract(format!("sample at non-navigable cell {x}")));
            }
            let mut routed = false;
            for (k, &c) in self.layout.centroids().iter().enumerate() {
                if map.distance_m(x, c) <= self.layout.radius_m() {
                    self.gps[k].samples.push(x, y);
                    if !touched.contains(&k) {
                        touched.push(k);
                    }
                    routed = true;
                }
            }
            assert!(routed, "coverage invariant violated: {x} is in no influence disk");
            self.measurements += 1;
        }

        let queries = map.navigable_cells();
        let cfg = self.cfg;
        let samples: Vec<(usize, SampleSet)> = touched
            .iter()
            .map(|&k| (k, self.gps[k].samples.clone()))
            .collect();
        let refits: Vec<(usize, Result<RefitResult>)> =
            par::map_slice(&samples, |(k, s)| (*k, refit_gp(s, &cfg, queries)));
        for (k, refit) in refits {
            let refit = refit?;
            let gp = &mut self.gps[k];
            gp.params = refit.params;
            gp.fallback = refit.fallback;
            gp.mean = Some(refit.mean);
            gp.std = Some(refit.std);
        }
        self.refresh_fusion();
        Ok(())
    }

    fn refresh_fusion(&mut self) {
        let (mean, std) = self.fuse();
        self.fused_mean = mean;
        self.fused_std = std;
    }

    /// Distance-weighted fusion of the per-GP posterior means and standard
    /// deviations at every navigable cell. With a single GP this degenerates
    /// to that GP's posterior, returned as-is.
    pub fn fuse(&self) -> (Vec<f64>, Vec<f64>) {
        let k = self.gps.len();
        let sigma0 = self.cfg.sigma0;
        if k == 1 {
            let gp = &self.gps[0];
            return (
                gp.mean.clone().unwrap_or_else(|| vec![0.0; self.ncells]),
                gp.std.clone().unwrap_or_else(|| vec![sigma0; self.ncells]),
            );
        }
        let mut mean = vec![0.0; self.ncells];
        let mut std = vec![0.0; self.ncells];
        for i in 0..self.ncells {
            let mut num_mu = 0.0;
            let mut num_sigma = 0.0;
            let mut den = 0.0;
            for kk in 0..k {
                if self.cfg.restrict_weights_to_covering && !self.covering[kk * self.ncells + i] {
                    continue;
                }
                let w = self.weights[kk * self.ncells + i];
                num_mu += w * self.gp_mean_at(kk, i);
                num_sigma += w * self.gp_std_at(kk, i);
                den += w;
            }
            mean[i] = num_mu / den;
            std[i] = num_sigma / den;
        }
        (mean, std)
    }
}

struct RefitResult {
    params: KernelParams,
    fallback: bool,
    mean: Vec<f64>,
    std: Vec<f64>,
}

fn refit_gp(samples: &SampleSet, cfg: &ModelConfig, queries: &[Cell]) -> Result<RefitResult> {
    let fit = fit_lengthscale(samples, cfg.lengthscale_bounds, cfg.noise);
    let params = KernelParams::new(cfg.sigma0, fit.params.lengthscale);
    let solver = GpSolver::new(samples, params, cfg.noise)?;
    let post = solver.predict(queries);
    Ok(RefitResult {
        params,
        fallback: fit.fallback,
        mean: post.mean,
        std: post.variance.iter().map(|v| v.sqrt()).collect(),
    })
}

/// KL divergence between two fused posteriors treated as diagonal Gaussians,
/// `0.5 [ sum ln(v2/v1) - d + sum v1/v2 + sum (dmu)^2/v2 ]`.
/// Variances are clamped at 1e-12 before evaluation.
pub fn kl_diag(prev: (&[f64], &[f64]), next: (&[f64], &[f64])) -> f64 {
    let (mu1, s1) = prev;
    let (mu2, s2) = next;
    assert_eq!(mu1.len(), mu2.len(), "query sets differ");
    let d = mu1.len() as f64;
    let mut log_ratio = 0.0;
    let mut trace = 0.0;
    let mut quad = 0.0;
    for i in 0..mu1.len() {
        let v1 = (s1[i] * s1[i]).max(1e-12);
        let v2 = (s2[i] * s2[i]).max(1e-12);
        log_ratio += (v2 / v1).ln();
        trace += v1 / v2;
        let dm = mu2[i] - mu1[i];
        quad += dm * dm / v2;
    }
    0.5 * (log_ratio - d + trace + quad)
}
