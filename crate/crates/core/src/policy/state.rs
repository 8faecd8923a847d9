//! Uncertainty histograms and their reduction to a discrete policy state.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MEAN_BINS: u8 = 10;
pub const VAR_BINS: u8 = 5;
/// Largest possible variance of a variable confined to [0, 1].
const MAX_VARIANCE: f64 = 0.25;
const SMOOTHING: usize = 5;
const PEAK_MASS: f64 = 0.05;
const PEAK_SEPARATION: f64 = 0.2;
const SKEW_MASS: f64 = 0.6;

/// `1 - 2|h - tau|`, clamped to [0, 1]; 1 on the decision boundary.
pub fn uncertainty(h: f64, tau: f64) -> f64 {
    (1.0 - 2.0 * (h - tau).abs()).clamp(0.0, 1.0)
}

/// Counts of sample uncertainties over `n_bins` equal bins of [0, 1]; the
/// last bin is closed so `u = 1` is kept.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UncertaintyHistogram {
    pub bins: Vec<u64>,
    pub total: u64,
}

pub fn build_histogram(scores: &[f64], tau: f64, n_bins: usize) -> Result<UncertaintyHistogram> {
    if scores.is_empty() {
        return Err(Error::EmptyInput("no scores to histogram"));
    }
    let mut bins = vec![0u64; n_bins];
    for &h in scores {
        let u = uncertainty(h, tau);
        let b = ((u * n_bins as f64) as usize).min(n_bins - 1);
        bins[b] += 1;
    }
    Ok(UncertaintyHistogram { bins, total: scores.len() as u64 })
}

/// Coarse shape of an uncertainty histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ShapeClass {
    CertainSkewed,
    UncertainSkewed,
    Bimodal,
    Flat,
}

impl ShapeClass {
    pub const ALL: [ShapeClass; 4] =
        [ShapeClass::CertainSkewed, ShapeClass::UncertainSkewed, ShapeClass::Bimodal, ShapeClass::Flat];

    fn ordinal(self) -> usize {
        self as usize
    }
}

/// Discretized (mean, variance, shape) of an uncertainty histogram.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "(u8, u8, ShapeClass)", from = "(u8, u8, ShapeClass)")]
pub struct StateKey {
    pub mean_bin: u8,
    pub var_bin: u8,
    pub shape: ShapeClass,
}

impl From<StateKey> for (u8, u8, ShapeClass) {
    fn from(k: StateKey) -> Self {
        (k.mean_bin, k.var_bin, k.shape)
    }
}

impl From<(u8, u8, ShapeClass)> for StateKey {
    fn from((mean_bin, var_bin, shape): (u8, u8, ShapeClass)) -> Self {
        Self { mean_bin, var_bin, shape }
    }
}

impl StateKey {
    pub const COUNT: usize = MEAN_BINS as usize * VAR_BINS as usize * ShapeClass::ALL.len();

    /// Dense index in `0..COUNT`.
    pub fn index(&self) -> usize {
        (self.mean_bin as usize * VAR_BINS as usize + self.var_bin as usize) * ShapeClass::ALL.len()
            + self.shape.ordinal()
    }

    pub fn all() -> impl Iterator<Item = StateKey> {
        (0..MEAN_BINS).flat_map(|m| {
            (0..VAR_BINS).flat_map(move |v| ShapeClass::ALL.into_iter().map(move |s| StateKey { mean_bin: m, var_bin: v, shape: s }))
        })
    }

    pub fn is_valid(&self) -> bool {
        self.mean_bin < MEAN_BINS && self.var_bin < VAR_BINS
    }
}

impl fmt::Display for StateKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {:?})", self.mean_bin, self.var_bin, self.shape)
    }
}

/// Shape of the histogram.
///
/// The counts are smoothed with a zero-padded 5-bin moving sum. Peaks are
/// plateaus of the smoothed curve higher than both neighbours whose window
/// holds more than 5% of the mass. Two peaks at least a fifth of the range
/// apart make the histogram bimodal; otherwise 60% of the mass below 0.3
/// (above 0.7) makes it certain- (uncertain-) skewed, else flat.
pub fn classify_shape(hist: &UncertaintyHistogram) -> ShapeClass {
    let n = hist.bins.len();
    let half = SMOOTHING / 2;
    let smooth: Vec<u64> = (0..n)
        .map(|i| hist.bins[i.saturating_sub(half)..(i + half + 1).min(n)].iter().sum())
        .collect();

    let threshold = PEAK_MASS * hist.total as f64;
    let mut peaks = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && smooth[j + 1] == smooth[i] {
            j += 1;
        }
        let left_lower = i == 0 || smooth[i - 1] < smooth[i];
        let right_lower = j == n - 1 || smooth[j + 1] < smooth[i];
        if left_lower && right_lower && smooth[i] as f64 > threshold {
            peaks.push((i + j) as f64 / 2.0);
        }
        i = j + 1;
    }
    let separation = PEAK_SEPARATION * n as f64;
    if let (Some(first), Some(last)) = (peaks.first(), peaks.last()) {
        if last - first >= separation {
            return ShapeClass::Bimodal;
        }
    }

    let total = hist.total as f64;
    let low: u64 = hist.bins.iter().enumerate().filter(|(b, _)| b * 10 < 3 * n).map(|(_, c)| c).sum();
    let high: u64 = hist.bins.iter().enumerate().filter(|(b, _)| b * 10 >= 7 * n).map(|(_, c)| c).sum();
    if low as f64 >= SKEW_MASS * total {
        ShapeClass::CertainSkewed
    } else if high as f64 >= SKEW_MASS * total {
        ShapeClass::UncertainSkewed
    } else {
        ShapeClass::Flat
    }
}

/// Mean and variance of the uncertainties, read at bin centers.
pub fn histogram_moments(hist: &UncertaintyHistogram) -> (f64, f64) {
    let n = hist.bins.len() as f64;
    let total = hist.total as f64;
    let center = |b: usize| (b as f64 + 0.5) / n;
    let mean = hist.bins.iter().enumerate().map(|(b, &c)| c as f64 * center(b)).sum::<f64>() / total;
    let var = hist
        .bins
        .iter()
        .enumerate()
        .map(|(b, &c)| c as f64 * (center(b) - mean).powi(2))
        .sum::<f64>()
        / total;
    (mean, var)
}

pub fn featurize_state(hist: &UncertaintyHistogram) -> StateKey {
    let (mean, var) = histogram_moments(hist);
    let mean_bin = ((mean * MEAN_BINS as f64) as u8).min(MEAN_BINS - 1);
    let var_bin = ((var / MAX_VARIANCE * VAR_BINS as f64) as u8).min(VAR_BINS - 1);
    StateKey { mean_bin, var_bin, shape: classify_shape(hist) }
}

/// Scores to state in one go.
pub fn state_of(scores: &[f64], tau: f64, n_bins: usize) -> Result<StateKey> {
    Ok(featurize_state(&build_histogram(scores, tau, n_bins)?))
}
