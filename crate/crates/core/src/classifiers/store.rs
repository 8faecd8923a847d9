use serde::{Deserialize, Serialize};

use crate::features::FeatureVector;

/// Binary sample label.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Positive,
    Negative,
}

impl Label {
    pub fn sign(self) -> f64 {
        match self {
            Label::Positive => 1.0,
            Label::Negative => -1.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Positive
    }
}

/// How long a [`LabeledStore`] keeps entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Retention {
    /// Keep entries stamped after `t - window`.
    Window(usize),
    Unbounded,
}

/// Time-stamped labeled feature vectors in insertion order.
///
/// Features are kept in one flat buffer so distance scans run over
/// contiguous memory.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledStore {
    retention: Retention,
    dim: usize,
    data: Vec<f64>,
    stamps: Vec<usize>,
    labels: Vec<Label>,
}

impl LabeledStore {
    pub fn new(retention: Retention, dim: usize) -> Self {
        Self { retention, dim, data: Vec::new(), stamps: Vec::new(), labels: Vec::new() }
    }

    pub fn retention(&self) -> Retention {
        self.retention
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn features(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn label(&self, i: usize) -> Label {
        self.labels[i]
    }

    pub fn stamp(&self, i: usize) -> usize {
        self.stamps[i]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn stamps(&self) -> &[usize] {
        &self.stamps
    }

    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|l| l.is_positive()).count();
        (pos, self.len() - pos)
    }

    /// Appends one entry stamped `t`. Panics if the feature length differs
    /// from the store's dimension.
    pub fn push(&mut self, t: usize, features: &FeatureVector, label: Label) {
        assert_eq!(features.len(), self.dim, "feature length mismatch");
        self.data.extend_from_slice(features.as_slice());
        self.stamps.push(t);
        self.labels.push(label);
    }

    /// Drops entries stamped `<= t - window`. No-op for unbounded stores.
    pub fn evict(&mut self, t: usize) {
        let Retention::Window(window) = self.retention else { return };
        let keep_from = self.stamps.iter().position(|&s| s + window > t).unwrap_or(self.len());
        if keep_from > 0 {
            self.data.drain(..keep_from * self.dim);
            self.stamps.drain(..keep_from);
            self.labels.drain(..keep_from);
        }
    }
}
