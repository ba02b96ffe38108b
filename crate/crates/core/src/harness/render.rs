//! Image emission: grayscale field renders and a path overlay.

use super::config::{ExperimentConfig, PlannerKind};
use super::eval::run_episode;
use crate::error::Result;
use crate::grid::{Cell, NavMap};
use crate::learner::QNetwork;
use image::{GrayImage, Luma, Rgb, RgbImage};
use std::path::{Path, PathBuf};
use std::sync::Arc;

/// Grayscale render: `round(255 * value)` at navigable cells, land black.
pub fn field_to_image(map: &NavMap, values: &[f64]) -> GrayImage {
    let mut img = GrayImage::new(map.width() as u32, map.height() as u32);
    for (i, &cell) in map.navigable_cells().iter().enumerate() {
        let v = (values[i].clamp(0.0, 1.0) * 255.0).round() as u8;
        img.put_pixel(cell.col as u32, cell.row as u32, Luma([v]));
    }
    img
}

const PATH_COLORS: [[u8; 3]; 3] = [[220, 40, 40], [40, 90, 220], [30, 170, 60]];
const WATER: [u8; 3] = [190, 205, 215];
const LAND: [u8; 3] = [25, 25, 25];

/// Path overlay: water/land base with one colored trail per agent.
pub fn paths_to_image(map: &NavMap, paths: &[Vec<Cell>]) -> RgbImage {
    let mut img = RgbImage::from_pixel(map.width() as u32, map.height() as u32, Rgb(LAND));
    for &cell in map.navigable_cells() {
        img.put_pixel(cell.col as u32, cell.row as u32, Rgb(WATER));
    }
    for (j, path) in paths.iter().enumerate() {
        let color = PATH_COLORS[j % PATH_COLORS.len()];
        for &cell in path {
            img.put_pixel(cell.col as u32, cell.row as u32, Rgb(color));
        }
    }
    img
}

/// Runs one episode (first seed, episode 0) and writes gt/mean/uncertainty
/// grayscale images plus the path overlay into `cfg.out`.
pub fn render(cfg: &ExperimentConfig, net: Option<&QNetwork<f32>>) -> Result<Vec<PathBuf>> {
    let map = super::load_map(cfg)?;
    let seed = cfg.seeds.first().copied().unwrap_or(0);
    let record = run_episode(&map, cfg, net, seed, 0)?;

    // rebuild the final surfaces by replaying the same episode's environment
    let global_model = cfg.planner == PlannerKind::Pso;
    let mut env = crate::env::Environment::new(Arc::clone(&map), cfg.env_config(global_model))?;
    env.reset(crate::rng::derive_seed(seed, "eval-episode", 0))?;
    // feed the recorded path samples back through the model
    let mut model = crate::localgp::LocalGpModel::new(
        &map,
        env.layout().clone(),
        cfg.model_config(),
    );
    let gt = env.ground_truth();
    let mut batches: Vec<Vec<(Cell, f64)>> = Vec::new();
    let steps = record.paths[0].len();
    for step in 0..steps {
        let mut batch = Vec::new();
        for path in &record.paths {
            let p = path[step];
            batch.push((p, gt.value(&map, p)?));
        }
        batches.push(batch);
    }
    for batch in &batches {
        model.add_samples(&map, batch)?;
    }

    std::fs::create_dir_all(&cfg.out)?;
    let write = |name: &str, img: GrayImage| -> Result<PathBuf> {
        let path = cfg.out.join(name);
        img.save(&path)
            .map_err(|e| crate::error::Error::Config(format!("{}: {e}", path.display())))?;
        Ok(path)
    };

    let mut written = Vec::new();
    written.push(write("gt.png", field_to_image(&map, gt.values()))?);
    written.push(write("mean.png", field_to_image(&map, model.fused_mean()))?);
    written.push(write("uncertainty.png", field_to_image(&map, model.fused_std()))?);
    let overlay_path = cfg.out.join("paths.png");
    paths_to_image(&map, &record.paths)
        .save(&overlay_path)
        .map_err(|e| crate::error::Error::Config(format!("{}: {e}", overlay_path.display())))?;
    written.push(overlay_path);
    Ok(written)
}

pub fn save_gray(path: &Path, img: &GrayImage) -> Result<()> {
    img.save(path)
        .map_err(|e| crate::error::Error::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_render_quantizes_exactly() {
        let map = NavMap::default_map();
        let values: Vec<f64> = (0..map.navigable_count())
            .map(|i| (i % 256) as f64 / 255.0)
            .collect();
        let img = field_to_image(map, &values);
        for (i, &cell) in map.navigable_cells().iter().enumerate() {
            let expect = (values[i] * 255.0).round() as u8;
            assert_eq!(img.get_pixel(cell.col as u32, cell.row as u32).0[0], expect);
        }
        // land stays black
        assert_eq!(img.get_pixel(0, 0).0[0], 0);
    }

    #[test]
    fn empty_model_uncertainty_renders_at_prior_level() {
        let map = NavMap::default_map();
        let model = crate::localgp::LocalGpModel::global(map, Default::default());
        let img = field_to_image(map, model.fused_std());
        for &cell in map.navigable_cells() {
            assert_eq!(img.get_pixel(cell.col as u32, cell.row as u32).0[0], 255);
        }
    }

    #[test]
    fn path_overlay_marks_visited_cells() {
        let map = NavMap::default_map();
        let path = vec![Cell::new(20, 18), Cell::new(20, 20), Cell::new(22, 20)];
        let img = paths_to_image(map, &[path.clone()]);
        for cell in path {
            assert_eq!(img.get_pixel(cell.col as u32, cell.row as u32).0, PATH_COLORS[0]);
        }
    }
}
