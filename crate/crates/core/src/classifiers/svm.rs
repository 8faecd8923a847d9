//! Long-term classifier: a linear SVM trained with stochastic subgradient
//! descent on the class-balanced hinge loss.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::SvmConfig;
use crate::error::{Error, Result};
use crate::features::FeatureVector;

use super::store::LabeledStore;

#[derive(Debug, Clone, PartialEq)]
pub struct SvmModel {
    pub weights: Vec<f64>,
    pub bias: f64,
    pub lambda: f64,
    /// Frame index of the last retrain.
    pub trained_at: usize,
}

/// Objective values at epoch boundaries, starting with the zero model.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub objective: Vec<f64>,
}

fn logistic(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut acc = [0.0f64; 4];
    let mut ca = a.chunks_exact(4);
    let mut cb = b.chunks_exact(4);
    for (x, y) in ca.by_ref().zip(cb.by_ref()) {
        for l in 0..4 {
            acc[l] += x[l] * y[l];
        }
    }
    for (x, y) in ca.remainder().iter().zip(cb.remainder()) {
        acc[0] += x * y;
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3])
}

/// Inverse class-frequency weights scaled so they sum to the sample count.
fn class_weights(store: &LabeledStore) -> Result<(f64, f64)> {
    let (pos, neg) = store.class_counts();
    if pos == 0 || neg == 0 {
        return Err(Error::DegenerateTrainingSet { positives: pos, negatives: neg });
    }
    let n = store.len() as f64;
    Ok((n / (2.0 * pos as f64), n / (2.0 * neg as f64)))
}

/// `λ‖w‖² + (1/n) Σ cᵢ · max(0, 1 − yᵢ(w·xᵢ + b))` with class-balancing weights `cᵢ`.
pub fn hinge_objective(store: &LabeledStore, weights: &[f64], bias: f64, lambda: f64) -> Result<f64> {
    let (cp, cn) = class_weights(store)?;
    let mut loss = 0.0;
    for i in 0..store.len() {
        let label = store.label(i);
        let c = if label.is_positive() { cp } else { cn };
        let margin = label.sign() * (dot(weights, store.features(i)) + bias);
        loss += c * (1.0 - margin).max(0.0);
    }
    let reg: f64 = weights.iter().map(|w| w * w).sum();
    Ok(lambda * reg + loss / store.len() as f64)
}

impl SvmModel {
    pub fn zero(dim: usize, lambda: f64) -> Self {
        Self { weights: vec![0.0; dim], bias: 0.0, lambda, trained_at: 0 }
    }

    /// Signed distance-like margin `w·x + b`.
    pub fn margin(&self, x: &FeatureVector) -> f64 {
        dot(&self.weights, x.as_slice()) + self.bias
    }

    /// Logistic squashing of the margin into [0, 1].
    pub fn score(&self, x: &FeatureVector) -> f64 {
        logistic(self.margin(x))
    }

    /// Trains on every entry of `store`.
    ///
    /// Each epoch visits the samples in a seeded random order with step
    /// `eta0 / (1 + epoch)`. The returned model is the best epoch-boundary
    /// iterate, so the reported objective never increases and never exceeds
    /// the zero model's.
    pub fn train(store: &LabeledStore, cfg: &SvmConfig, seed: u64, t: usize) -> Result<(SvmModel, TrainReport)> {
        let (cp, cn) = class_weights(store)?;
        let dim = store.dim();
        let n = store.len();
        let lambda = cfg.lambda;

        // w = scale · v keeps the shrink step O(1)
        let mut v = vec![0.0f64; dim];
        let mut scale = 1.0f64;
        let mut bias = 0.0f64;

        let mut best_w = vec![0.0f64; dim];
        let mut best_b = 0.0;
        let mut best_obj = hinge_objective(store, &best_w, best_b, lambda)?;
        let mut history = vec![best_obj];

        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut order: Vec<usize> = (0..n).collect();
        for epoch in 0..cfg.epochs {
            let eta = cfg.eta0 / (1.0 + epoch as f64);
            order.shuffle(&mut rng);
            for &i in &order {
                let x = store.features(i);
                let label = store.label(i);
                let y = label.sign();
                let c = if label.is_positive() { cp } else { cn };
                let margin = y * (scale * dot(&v, x) + bias);
                scale *= 1.0 - 2.0 * eta * lambda;
                if margin < 1.0 {
                    let step = eta * c * y / scale;
                    for (vj, xj) in v.iter_mut().zip(x) {
                        *vj += step * xj;
                    }
                    bias += eta * c * y;
                }
                if scale < 1e-9 {
                    for vj in v.iter_mut() {
                        *vj *= scale;
                    }
                    scale = 1.0;
                }
            }
            let w: Vec<f64> = v.iter().map(|vj| vj * scale).collect();
            let obj = hinge_objective(store, &w, bias, lambda)?;
            if obj < best_obj {
                best_obj = obj;
                best_w = w;
                best_b = bias;
            }
            history.push(best_obj);
        }
        Ok((SvmModel { weights: best_w, bias: best_b, lambda, trained_at: t }, TrainReport { objective: history }))
    }
}
