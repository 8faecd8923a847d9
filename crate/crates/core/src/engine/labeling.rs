//! Per-sample labeling rules and the per-frame bookkeeping built on them.

use serde::{Deserialize, Serialize};

use crate::classifiers::Label;
use crate::error::Result;
use crate::features::FeatureVector;
use crate::geometry::BoundingBox;

const ALPHA_EPS: f64 = 1e-6;

/// Which classifier decided a sample's label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelSource {
    Main,
    Aux,
    Vote,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoredSample {
    pub bbox: BoundingBox,
    pub features: FeatureVector,
    pub h1: f64,
    /// Present iff the aux classifier scored this sample.
    pub h2: Option<f64>,
    pub label: Label,
    pub source: LabelSource,
    /// Score the label was thresholded from.
    pub decisive_score: f64,
}

/// Thresholds one score; a score exactly at `tau` is background.
pub fn label_single(h: f64, tau: f64) -> Label {
    if h > tau {
        Label::Positive
    } else {
        Label::Negative
    }
}

/// Two-classifier vote. The guards are tested in order: a low aux score
/// defers to the main classifier, then a low main score defers to the aux,
/// otherwise the weighted vote decides.
pub fn label_cotrack(h1: f64, h2: f64, alpha: (f64, f64), tau: f64) -> (Label, LabelSource) {
    if h2 < tau {
        (label_single(h1, tau), LabelSource::Main)
    } else if h1 < tau {
        (label_single(h2, tau), LabelSource::Aux)
    } else {
        (label_single(alpha.0 * h1 + alpha.1 * h2, tau), LabelSource::Vote)
    }
}

/// Uncertainty-gated labeling: the main classifier decides when its score
/// is more than `margin` away from `tau`; otherwise `aux` is called exactly once.
pub fn label_active(
    h1: f64,
    tau: f64,
    margin: f64,
    aux: impl FnOnce() -> Result<f64>,
) -> Result<(Label, Option<f64>, LabelSource)> {
    if (h1 - tau).abs() > margin {
        Ok((label_single(h1, tau), None, LabelSource::Main))
    } else {
        let h2 = aux()?;
        Ok((label_single(h2, tau), Some(h2), LabelSource::Aux))
    }
}

/// Re-weights the two classifiers by how often each one's solo label agreed
/// with the final label, over samples that carry both scores.
pub fn update_alpha(samples: &[ScoredSample], tau: f64, previous: (f64, f64)) -> (f64, f64) {
    let mut n = 0usize;
    let (mut agree1, mut agree2) = (0usize, 0usize);
    for s in samples {
        let Some(h2) = s.h2 else { continue };
        n += 1;
        agree1 += (label_single(s.h1, tau) == s.label) as usize;
        agree2 += (label_single(h2, tau) == s.label) as usize;
    }
    if n == 0 {
        return previous;
    }
    let c1 = agree1 as f64 / n as f64;
    let c2 = agree2 as f64 / n as f64;
    let denom = c1 + c2 + 2.0 * ALPHA_EPS;
    let a1 = (c1 + ALPHA_EPS) / denom;
    (a1, 1.0 - a1)
}

/// Long-term retraining fires on multiples of the window.
pub fn schedule_aux_update(t: usize, window: usize) -> bool {
    window > 0 && t.is_multiple_of(window)
}

/// Score-weighted mean of the positive samples' centers and sizes.
/// With no positives the previous box is kept and the frame is flagged lost.
pub fn estimate_target(samples: &[ScoredSample], previous: BoundingBox) -> (BoundingBox, bool) {
    let mut acc = [0.0f64; 4];
    let mut total = 0.0;
    for s in samples.iter().filter(|s| s.label.is_positive()) {
        let w = s.decisive_score;
        let (cx, cy) = s.bbox.center();
        acc[0] += w * cx;
        acc[1] += w * cy;
        acc[2] += w * s.bbox.w;
        acc[3] += w * s.bbox.h;
        total += w;
    }
    if total <= 0.0 {
        return (previous, true);
    }
    let [cx, cy, w, h] = acc.map(|v| v / total);
    match BoundingBox::from_center(cx, cy, w, h) {
        Some(b) => (b, false),
        None => (previous, true),
    }
}
