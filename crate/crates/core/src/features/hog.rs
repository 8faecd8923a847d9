//! Histogram of oriented gradients over a square grayscale patch.

use crate::config::FeatureConfig;

const BLOCK_EPS: f64 = 1e-3;
const HYS_CLIP: f64 = 0.2;

/// Computes block-normalized HOG (L2-Hys) for a `size × size` row-major patch.
///
/// Gradients use centered differences with replicated borders, orientations
/// are unsigned in [0°, 180°) and each vote is split linearly between the two
/// nearest bin centers. Blocks of `block_size²` cells slide one cell at a time.
pub fn hog(gray: &[f64], size: usize, cfg: &FeatureConfig) -> Vec<f64> {
    debug_assert_eq!(gray.len(), size * size);
    let bins = cfg.orientation_bins;
    let cell = cfg.cell_size;
    let cells = size / cell;
    let bin_width = 180.0 / bins as f64;
    let mut hist = vec![0.0f64; cells * cells * bins];

    let at = |x: usize, y: usize| gray[y * size + x];
    for y in 0..size {
        let (up, down) = (y.saturating_sub(1), (y + 1).min(size - 1));
        let cell_row = (y / cell) * cells;
        for x in 0..size {
            let gx = at((x + 1).min(size - 1), y) - at(x.saturating_sub(1), y);
            let gy = at(x, down) - at(x, up);
            if gx == 0.0 && gy == 0.0 {
                continue;
            }
            let mag = (gx * gx + gy * gy).sqrt();
            let mut angle = gy.atan2(gx).to_degrees();
            if angle < 0.0 {
                angle += 180.0;
            }
            if angle >= 180.0 {
                angle -= 180.0;
            }
            let pos = angle / bin_width - 0.5;
            let lo = pos.floor();
            let frac = pos - lo;
            let lo_bin = if lo < 0.0 { bins - 1 } else { lo as usize };
            let hi_bin = if lo_bin + 1 == bins { 0 } else { lo_bin + 1 };
            let base = (cell_row + x / cell) * bins;
            hist[base + lo_bin] += mag * (1.0 - frac);
            hist[base + hi_bin] += mag * frac;
        }
    }

    let block = cfg.block_size;
    let blocks = cells + 1 - block;
    let mut out = Vec::with_capacity(cfg.hog_len());
    let mut buf = Vec::with_capacity(block * block * bins);
    for by in 0..blocks {
        for bx in 0..blocks {
            buf.clear();
            for cy in by..by + block {
                for cx in bx..bx + block {
                    let base = (cy * cells + cx) * bins;
                    buf.extend_from_slice(&hist[base..base + bins]);
                }
            }
            normalize(&mut buf);
            for v in buf.iter_mut() {
                *v = v.min(HYS_CLIP);
            }
            normalize(&mut buf);
            out.extend_from_slice(&buf);
        }
    }
    out
}

fn normalize(v: &mut [f64]) {
    let norm = (v.iter().map(|x| x * x).sum::<f64>() + BLOCK_EPS * BLOCK_EPS).sqrt();
    for x in v.iter_mut() {
        *x /= norm;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_patch_has_no_gradient_energy() {
        let cfg = FeatureConfig::default();
        let h = hog(&vec![77.0; 32 * 32], 32, &cfg);
        assert_eq!(h.len(), cfg.hog_len());
        assert!(h.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn vertical_edge_votes_horizontal_gradient_bin() {
        let cfg = FeatureConfig::default();
        let patch: Vec<f64> = (0..32 * 32).map(|i| if i % 32 < 4 { 0.0 } else { 100.0 }).collect();
        let h = hog(&patch, 32, &cfg);
        // A 0° gradient sits halfway between the 170° and 10° bin centers.
        let cell = &h[..9];
        assert!(cell[0] > 0.0 && (cell[0] - cell[8]).abs() < 1e-12);
        assert!(cell[1..8].iter().all(|&v| v == 0.0));
        // The last block column never sees the edge.
        let last_block = &h[2 * 36..3 * 36];
        assert!(last_block.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn blocks_are_unit_or_zero() {
        let cfg = FeatureConfig::default();
        let patch: Vec<f64> = (0..32 * 32).map(|i| ((i * 37) % 101) as f64).collect();
        let h = hog(&patch, 32, &cfg);
        for block in h.chunks(36) {
            let n: f64 = block.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 1.0).abs() < 1e-3 || n == 0.0, "{n}");
        }
    }
}
