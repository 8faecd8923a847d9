//! Deterministic candidate sampling and per-candidate appearance features.

mod color_names;
mod hog;

use serde::{Deserialize, Serialize};

use crate::config::FeatureConfig;
use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::sequence::Frame;

pub use color_names::{ColorNameTable, COLOR_NAMES, COLOR_NAME_COUNT};
pub use hog::hog;

/// HOG block descriptors followed by the color-name histogram.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct FeatureVector(Vec<f64>);

impl FeatureVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// The trailing color-name histogram.
    pub fn color_histogram(&self) -> &[f64] {
        &self.0[self.0.len() - COLOR_NAME_COUNT..]
    }

    pub fn hog_part(&self) -> &[f64] {
        &self.0[..self.0.len() - COLOR_NAME_COUNT]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Candidate {
    pub cx: f64,
    pub cy: f64,
    pub scale: f64,
}

/// Equi-spaced candidate centers over a search region, one square grid per scale.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleGrid {
    pub region: BoundingBox,
    pub scales: Vec<f64>,
    pub positions: Vec<Candidate>,
    /// Size of the box the grid was built around.
    pub base_size: (f64, f64),
}

impl SampleGrid {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn boxes(&self) -> Vec<BoundingBox> {
        let (w, h) = self.base_size;
        self.positions
            .iter()
            .map(|c| BoundingBox { x: c.cx - c.scale * w / 2.0, y: c.cy - c.scale * h / 2.0, w: c.scale * w, h: c.scale * h })
            .collect()
    }
}

/// Builds the candidate grid around `last`.
///
/// The search region keeps the center of `last`, triples each side and is
/// clipped to the frame. Each scale gets a `g × g` grid with `g² = n_s / |scales|`;
/// centers sit at the middles of a uniform `g × g` tiling of the region.
pub fn make_grid(last: &BoundingBox, frame_dims: (usize, usize), n_s: usize, scales: &[f64]) -> Result<SampleGrid> {
    if scales.is_empty() || !n_s.is_multiple_of(scales.len()) {
        return Err(Error::config("tracker.n_samples", "must split evenly across scales"));
    }
    let per_scale = n_s / scales.len();
    let side = (per_scale as f64).sqrt().round() as usize;
    if side * side != per_scale || side == 0 {
        return Err(Error::config("tracker.n_samples", format!("{per_scale} per scale is not a perfect square")));
    }
    let (cx, cy) = last.center();
    let region = BoundingBox::from_center(cx, cy, 3.0 * last.w, 3.0 * last.h)
        .and_then(|r| r.clip(frame_dims.0 as f64, frame_dims.1 as f64))
        .ok_or(Error::TargetLost)?;
    let step_x = region.w / side as f64;
    let step_y = region.h / side as f64;
    let mut positions = Vec::with_capacity(n_s);
    for &scale in scales {
        for j in 0..side {
            for i in 0..side {
                positions.push(Candidate {
                    cx: region.x + (i as f64 + 0.5) * step_x,
                    cy: region.y + (j as f64 + 0.5) * step_y,
                    scale,
                });
            }
        }
    }
    Ok(SampleGrid { region, scales: scales.to_vec(), positions, base_size: (last.w, last.h) })
}

/// Resamples `candidate` to a square patch with bilinear interpolation.
/// Coordinates outside the frame are clamped to the nearest edge pixel.
pub(crate) fn resample(frame: &Frame, candidate: &BoundingBox, size: usize) -> Vec<[f64; 3]> {
    let max_x = (frame.width - 1) as f64;
    let max_y = (frame.height - 1) as f64;
    let mut out = Vec::with_capacity(size * size);
    let sx = candidate.w / size as f64;
    let sy = candidate.h / size as f64;
    for v in 0..size {
        let fy = (candidate.y + (v as f64 + 0.5) * sy - 0.5).clamp(0.0, max_y);
        let y0 = fy.floor() as usize;
        let y1 = (y0 + 1).min(frame.height - 1);
        let ty = fy - y0 as f64;
        for u in 0..size {
            let fx = (candidate.x + (u as f64 + 0.5) * sx - 0.5).clamp(0.0, max_x);
            let x0 = fx.floor() as usize;
            let x1 = (x0 + 1).min(frame.width - 1);
            let tx = fx - x0 as f64;
            let (p00, p10, p01, p11) = (frame.rgb(x0, y0), frame.rgb(x1, y0), frame.rgb(x0, y1), frame.rgb(x1, y1));
            let mut px = [0.0; 3];
            for c in 0..3 {
                let top = f64::from(p00[c]) * (1.0 - tx) + f64::from(p10[c]) * tx;
                let bottom = f64::from(p01[c]) * (1.0 - tx) + f64::from(p11[c]) * tx;
                px[c] = top * (1.0 - ty) + bottom * ty;
            }
            out.push(px);
        }
    }
    out
}

/// Features of an already resampled RGB patch.
pub fn patch_features(patch: &[[f64; 3]], cfg: &FeatureConfig, table: &ColorNameTable) -> FeatureVector {
    let size = cfg.patch_size;
    let gray: Vec<f64> = patch.iter().map(|p| 0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]).collect();
    let mut values = hog(&gray, size, cfg);
    let mut counts = [0usize; COLOR_NAME_COUNT];
    for p in patch {
        let rgb = p.map(|c| c.round().clamp(0.0, 255.0) as u8);
        counts[table.name_index(rgb)] += 1;
    }
    let total = patch.len() as f64;
    values.extend(counts.iter().map(|&c| c as f64 / total));
    FeatureVector(values)
}

/// Resamples the candidate to the canonical patch and describes it.
pub fn extract_features(frame: &Frame, candidate: &BoundingBox, cfg: &FeatureConfig) -> Result<FeatureVector> {
    if candidate.clip(frame.width as f64, frame.height as f64).is_none() {
        return Err(Error::CandidateOutsideFrame);
    }
    let patch = resample(frame, candidate, cfg.patch_size);
    Ok(patch_features(&patch, cfg, ColorNameTable::builtin()))
}
