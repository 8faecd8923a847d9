//! Hyperparameters for the tracker, its classifiers and the margin policy.
//!
//! Everything is (de)serializable as TOML. Unknown keys are rejected so a
//! typo in a config file surfaces as a configuration error instead of being
//! silently ignored.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How each sample's final label is produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelingMode {
    /// Main classifier alone.
    Single,
    /// Both classifiers score every sample; weighted vote.
    Cotrack,
    /// Aux queried inside a fixed uncertainty margin.
    ActiveFixed,
    /// Aux queried inside a margin picked per frame by a Q-table.
    ActiveQlearn,
}

impl LabelingMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            LabelingMode::Single => "single",
            LabelingMode::Cotrack => "cotrack",
            LabelingMode::ActiveFixed => "active-fixed",
            LabelingMode::ActiveQlearn => "active-qlearn",
        }
    }
}

impl fmt::Display for LabelingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for LabelingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "single" => Ok(LabelingMode::Single),
            "cotrack" => Ok(LabelingMode::Cotrack),
            "active-fixed" => Ok(LabelingMode::ActiveFixed),
            "active-qlearn" => Ok(LabelingMode::ActiveQlearn),
            other => Err(Error::config("mode", format!("unknown labeling mode {other:?}"))),
        }
    }
}

/// Canonical patch and HOG geometry.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub patch_size: usize,
    pub cell_size: usize,
    /// Cells per block side.
    pub block_size: usize,
    pub orientation_bins: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        Self { patch_size: 32, cell_size: 8, block_size: 2, orientation_bins: 9 }
    }
}

impl FeatureConfig {
    pub fn cells_per_side(&self) -> usize {
        self.patch_size / self.cell_size
    }

    pub fn hog_len(&self) -> usize {
        let blocks = self.cells_per_side() + 1 - self.block_size;
        blocks * blocks * self.block_size * self.block_size * self.orientation_bins
    }

    pub fn feature_len(&self) -> usize {
        self.hog_len() + crate::features::COLOR_NAME_COUNT
    }

    fn validate(&self) -> Result<()> {
        if self.cell_size == 0 || self.patch_size == 0 || !self.patch_size.is_multiple_of(self.cell_size) {
            return Err(Error::config(
                "features.patch_size",
                "must be a positive multiple of features.cell_size",
            ));
        }
        if self.block_size == 0 || self.block_size > self.cells_per_side() {
            return Err(Error::config("features.block_size", "must be in [1, cells per side]"));
        }
        if self.orientation_bins == 0 {
            return Err(Error::config("features.orientation_bins", "must be at least 1"));
        }
        Ok(())
    }
}

/// Long-term classifier training schedule.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SvmConfig {
    pub lambda: f64,
    pub eta0: f64,
    pub epochs: usize,
}

impl Default for SvmConfig {
    fn default() -> Self {
        Self { lambda: 1e-4, eta0: 0.1, epochs: 20 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Decision threshold on classifier scores.
    pub tau: f64,
    /// Short-term memory span and long-term retraining period, in frames.
    pub window: usize,
    /// Candidates per frame, split evenly across `scales`.
    pub n_samples: usize,
    pub scales: Vec<f64>,
    pub knn_k: usize,
    pub mode: LabelingMode,
    /// Margin used by [`LabelingMode::ActiveFixed`].
    pub fixed_margin: f64,
    /// First-frame candidates above this IOU seed positives.
    pub init_positive_iou: f64,
    /// First-frame candidates below this IOU seed negatives.
    pub init_negative_iou: f64,
    pub seed: u64,
    pub features: FeatureConfig,
    pub svm: SvmConfig,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            tau: 0.5,
            window: 10,
            n_samples: 147,
            scales: vec![0.95, 1.0, 1.05],
            knn_k: 5,
            mode: LabelingMode::ActiveFixed,
            fixed_margin: 0.25,
            init_positive_iou: 0.7,
            init_negative_iou: 0.3,
            seed: 0,
            features: FeatureConfig::default(),
            svm: SvmConfig::default(),
        }
    }
}

impl TrackerConfig {
    /// Side of the per-scale candidate grid.
    pub fn grid_side(&self) -> usize {
        let per_scale = self.n_samples / self.scales.len().max(1);
        (per_scale as f64).sqrt().round() as usize
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(Error::config("tracker.tau", "must lie in (0, 1)"));
        }
        if self.window == 0 {
            return Err(Error::config("tracker.window", "must be at least 1"));
        }
        if self.scales.is_empty() || self.scales.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::config("tracker.scales", "must be a non-empty list of positive factors"));
        }
        if self.n_samples == 0 || !self.n_samples.is_multiple_of(self.scales.len()) {
            return Err(Error::config(
                "tracker.n_samples",
                "must be a positive multiple of the number of scales",
            ));
        }
        let per_scale = self.n_samples / self.scales.len();
        let side = self.grid_side();
        if side * side != per_scale {
            return Err(Error::config(
                "tracker.n_samples",
                format!("{per_scale} samples per scale is not a perfect square"),
            ));
        }
        if self.knn_k == 0 {
            return Err(Error::config("tracker.knn_k", "must be at least 1"));
        }
        if !(0.0..=0.5).contains(&self.fixed_margin) {
            return Err(Error::config("tracker.fixed_margin", "must lie in [0, 0.5]"));
        }
        if !(self.init_negative_iou <= self.init_positive_iou
            && (0.0..=1.0).contains(&self.init_negative_iou)
            && (0.0..1.0).contains(&self.init_positive_iou))
        {
            return Err(Error::config(
                "tracker.init_positive_iou",
                "need 0 <= init_negative_iou <= init_positive_iou < 1",
            ));
        }
        self.features.validate()?;
        if !(self.svm.lambda > 0.0 && self.svm.lambda.is_finite()) {
            return Err(Error::config("tracker.svm.lambda", "must be positive"));
        }
        if !(self.svm.eta0 > 0.0 && self.svm.eta0.is_finite()) {
            return Err(Error::config("tracker.svm.eta0", "must be positive"));
        }
        if self.svm.epochs == 0 {
            return Err(Error::config("tracker.svm.epochs", "must be at least 1"));
        }
        Ok(())
    }
}

/// Bootstrapping rule used by the value update.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum UpdateRule {
    /// Bootstrap from the best next action.
    QLearning,
    /// Bootstrap from the next action actually taken.
    Sarsa,
}

/// What a high-overlap frame pays.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HighOverlapReward {
    /// Three times the IOU.
    Scaled,
    /// A flat 3.
    Flat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PolicyConfig {
    pub n_bins: usize,
    pub n_actions: usize,
    pub gamma: f64,
    /// Gumbel perturbation scale `C`; the per-action scale is `C / sqrt(N + 1)`.
    pub exploration: f64,
    /// Learning rate is `1 / (1 + N)^lr_exponent`.
    pub lr_exponent: f64,
    pub update_rule: UpdateRule,
    pub high_overlap_reward: HighOverlapReward,
    /// Consecutive low-overlap annotated frames that trigger the penalty.
    pub loss_streak: usize,
    pub seed: u64,
}

impl Default for PolicyConfig {
    fn default() -> Self {
        Self {
            n_bins: 100,
            n_actions: 25,
            gamma: 0.99,
            exploration: 0.5,
            lr_exponent: 0.6,
            update_rule: UpdateRule::QLearning,
            high_overlap_reward: HighOverlapReward::Scaled,
            loss_streak: 5,
            seed: 0,
        }
    }
}

impl PolicyConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bins == 0 {
            return Err(Error::config("policy.n_bins", "must be at least 1"));
        }
        if self.n_actions < 2 {
            return Err(Error::config("policy.n_actions", "must be at least 2"));
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return Err(Error::config("policy.gamma", "must lie in (0, 1]"));
        }
        if !(self.exploration >= 0.0 && self.exploration.is_finite()) {
            return Err(Error::config("policy.exploration", "must be non-negative"));
        }
        if !(self.lr_exponent > 0.0 && self.lr_exponent.is_finite()) {
            return Err(Error::config("policy.lr_exponent", "must be positive"));
        }
        if self.loss_streak == 0 {
            return Err(Error::config("policy.loss_streak", "must be at least 1"));
        }
        Ok(())
    }
}

/// The full set of knobs, as stored in a config file.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub tracker: TrackerConfig,
    pub policy: PolicyConfig,
}

impl Config {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Config = toml::from_str(text).map_err(|e| {
            let msg = e.message().to_string();
            Error::config("config", msg)
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| {
            Error::config(path.display().to_string(), format!("cannot read config: {e}"))
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            Error::Config { field, reason } => {
                Error::config(field, format!("{reason} (in {})", path.display()))
            }
            other => other,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        self.tracker.validate()?;
        self.policy.validate()
    }
}
