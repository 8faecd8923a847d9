use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const SUCCESS_POINTS: usize = 101;
pub const PRECISION_MAX_PX: usize = 50;
/// Location-error threshold the precision score is read at.
pub const PRECISION_AT: usize = 20;

/// A rate curve sampled on a fixed threshold grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Curve {
    pub thresholds: Vec<f64>,
    pub values: Vec<f64>,
}

impl Curve {
    /// Pointwise mean of curves sharing one grid.
    pub fn mean(curves: &[Curve]) -> Result<Curve> {
        let first = curves.first().ok_or(Error::EmptyInput("no curves to average"))?;
        let mut values = vec![0.0; first.values.len()];
        for c in curves {
            if c.thresholds != first.thresholds {
                return Err(Error::data("curves", "threshold grids differ"));
            }
            for (v, x) in values.iter_mut().zip(&c.values) {
                *v += x;
            }
        }
        let n = curves.len() as f64;
        values.iter_mut().for_each(|v| *v /= n);
        Ok(Curve { thresholds: first.thresholds.clone(), values })
    }

    pub fn value_at(&self, threshold: f64) -> Option<f64> {
        self.thresholds.iter().position(|&t| t == threshold).map(|i| self.values[i])
    }
}

/// Fraction of frames whose overlap strictly exceeds each threshold
/// `0, 0.01, ..., 1`.
pub fn success_curve(ious: &[f64]) -> Result<Curve> {
    if ious.is_empty() {
        return Err(Error::EmptyInput("no frames to evaluate"));
    }
    let n = ious.len() as f64;
    let thresholds: Vec<f64> = (0..SUCCESS_POINTS).map(|i| i as f64 / (SUCCESS_POINTS - 1) as f64).collect();
    let values = thresholds.iter().map(|&th| ious.iter().filter(|&&o| o > th).count() as f64 / n).collect();
    Ok(Curve { thresholds, values })
}

/// Fraction of frames whose center error is at most each threshold
/// `0, 1, ..., 50` pixels.
pub fn precision_curve(errors: &[f64]) -> Result<Curve> {
    if errors.is_empty() {
        return Err(Error::EmptyInput("no frames to evaluate"));
    }
    let n = errors.len() as f64;
    let thresholds: Vec<f64> = (0..=PRECISION_MAX_PX).map(|d| d as f64).collect();
    let values = thresholds.iter().map(|&d| errors.iter().filter(|&&e| e <= d).count() as f64 / n).collect();
    Ok(Curve { thresholds, values })
}

/// Trapezoid-rule area under a curve, normalized by its threshold span.
pub fn auc(curve: &Curve) -> f64 {
    let t = &curve.thresholds;
    let v = &curve.values;
    if t.len() < 2 {
        return v.first().copied().unwrap_or(0.0);
    }
    let area: f64 = (1..t.len()).map(|i| (t[i] - t[i - 1]) * (v[i] + v[i - 1]) / 2.0).sum();
    area / (t[t.len() - 1] - t[0])
}

pub fn measure_fps(frames: usize, seconds: f64) -> Option<f64> {
    (seconds > 0.0).then(|| frames as f64 / seconds)
}
