//! Estimation-error metrics: sum of residuals, its mass-normalized variant,
//! and peak-error statistics over detected local maxima of the ground truth.
//!
//! Peaks are cells that dominate their 1.5 km neighborhood (maximum filter),
//! exceed a noise floor of 0.1, and look flat under a second-pass Sobel
//! gradient (the Sobel magnitude of the Sobel magnitude stays below 0.05).

use crate::error::{Error, Result};
use crate::grid::{Cell, NavMap};

/// Neighborhood radius of the peak maximum filter.
pub const PEAK_NEIGHBORHOOD_M: f64 = 1500.0;
/// Cells at or below this value are never peaks.
pub const PEAK_NOISE_FLOOR: f64 = 0.1;
/// Upper bound on the second-pass Sobel magnitude at a peak.
pub const PEAK_FLATNESS: f64 = 0.05;

/// Sum of absolute residuals over navigable cells.
pub fn sor(mu_hat: &[f64], gt: &[f64]) -> Result<f64> {
    if mu_hat.len() != gt.len() {
        return Err(Error::Contract(format!(
            "support mismatch: {} vs {} cells",
            mu_hat.len(),
            gt.len()
        )));
    }
    Ok(mu_hat.iter().zip(gt).map(|(m, f)| (m - f).abs()).sum())
}

/// SoR normalized by the ground-truth mass.
pub fn nsor(mu_hat: &[f64], gt: &[f64]) -> Result<f64> {
    let mass: f64 = gt.iter().sum();
    if !(mass > 0.0) {
        return Err(Error::UndefinedMetric("nSoR of an all-zero ground truth".into()));
    }
    Ok(sor(mu_hat, gt)? / mass)
}

/// Arithmetic mean (used for the mean-uncertainty column of result rows).
pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Expands navigable-cell values into a dense image, land cells as 0.
pub fn field_image(map: &NavMap, values: &[f64]) -> Vec<f64> {
    let mut img = vec![0.0; map.height() * map.width()];
    for (i, &cell) in map.navigable_cells().iter().enumerate() {
        img[cell.row * map.width() + cell.col] = values[i];
    }
    img
}

/// 3x3 Sobel gradient magnitude with the kernels normalized to derivative
/// scale (divided by 8), zero padding outside the image.
pub fn sobel_magnitude(height: usize, width: usize, img: &[f64]) -> Vec<f64> {
    let at = |r: i64, c: i64| -> f64 {
        if r < 0 || c < 0 || r >= height as i64 || c >= width as i64 {
            0.0
        } else {
            img[r as usize * width + c as usize]
        }
    };
    let mut out = vec![0.0; height * width];
    for r in 0..height as i64 {
        for c in 0..width as i64 {
            let gx = (at(r - 1, c + 1) + 2.0 * at(r, c + 1) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r, c - 1) + at(r + 1, c - 1));
            let gy = (at(r + 1, c - 1) + 2.0 * at(r + 1, c) + at(r + 1, c + 1))
                - (at(r - 1, c - 1) + 2.0 * at(r - 1, c) + at(r - 1, c + 1));
            out[r as usize * width + c as usize] = (gx * gx + gy * gy).sqrt() / 8.0;
        }
    }
    out
}

/// Local maxima of the ground truth, ordered by (row, col).
pub fn detect_peaks(map: &NavMap, gt: &[f64]) -> Vec<Cell> {
    let img = field_image(map, gt);
    let g1 = sobel_magnitude(map.height(), map.width(), &img);
    let g2 = sobel_magnitude(map.height(), map.width(), &g1);

    let r_cells = (PEAK_NEIGHBORHOOD_M / map.cell_size_m()).ceil() as i64;
    let mut peaks = Vec::new();
    for (i, &cell) in map.navigable_cells().iter().enumerate() {
        let v = gt[i];
        if v <= PEAK_NOISE_FLOOR {
            continue;
        }
        if g2[cell.row * map.width() + cell.col] >= PEAK_FLATNESS {
            continue;
        }
        let mut is_max = true;
        'scan: for dr in -r_cells..=r_cells {
            for dc in -r_cells..=r_cells {
                let r = cell.row as i64 + dr;
                let c = cell.col as i64 + dc;
                if r < 0 || c < 0 || r >= map.height() as i64 || c >= map.width() as i64 {
                    continue;
                }
                let other = Cell::new(r as usize, c as usize);
                if map.distance_m(cell, other) > PEAK_NEIGHBORHOOD_M {
                    continue;
                }
                if img[other.row * map.width() + other.col] > v {
                    is_max = false;
                    break 'scan;
                }
            }
        }
        if is_max {
            peaks.push(cell);
        }
    }
    peaks
}

/// Mean and max absolute error at the detected ground-truth peaks.
pub fn peak_errors(map: &NavMap, mu_hat: &[f64], gt: &[f64]) -> Result<(f64, f64)> {
    if mu_hat.len() != gt.len() {
        return Err(Error::Contract("support mismatch".into()));
    }
    let peaks = detect_peaks(map, gt);
    if peaks.is_empty() {
        return Err(Error::UndefinedMetric("no peaks detected in the ground truth".into()));
    }
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for &p in &peaks {
        let i = map.nav_index(p).expect("peaks are navigable");
        let e = (mu_hat[i] - gt[i]).abs();
        sum += e;
        max = max.max(e);
    }
    Ok((sum / peaks.len() as f64, max))
}
