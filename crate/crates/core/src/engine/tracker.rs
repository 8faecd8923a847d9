use std::time::{Duration, Instant};

use crate::classifiers::{KnnModel, Label, LabeledStore, Retention, SvmModel};
use crate::config::{LabelingMode, TrackerConfig};
use crate::error::{Error, Result};
use crate::features::{extract_features, make_grid, FeatureVector};
use crate::geometry::{iou, BoundingBox};
use crate::seed::mix_seed;
use crate::sequence::{Frame, Sequence};

use super::labeling::{
    estimate_target, label_active, label_cotrack, label_single, schedule_aux_update, update_alpha, LabelSource,
    ScoredSample,
};

/// Chooses the uncertainty margin for a frame from the main classifier's scores.
pub trait MarginSelector {
    fn select_margin(&self, h1: &[f64], tau: f64) -> f64;
}

/// Everything the tracker produced for one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameResult {
    pub index: usize,
    pub estimate: BoundingBox,
    pub samples: Vec<ScoredSample>,
    /// Share of samples labeled by the aux classifier.
    pub queried_fraction: f64,
    /// Margin in effect, for the active modes.
    pub margin: Option<f64>,
    pub alpha: (f64, f64),
    pub lost: bool,
}

/// Candidates of a frame scored by the main classifier, before labeling.
#[derive(Debug, Clone)]
pub struct Observation {
    pub index: usize,
    pub boxes: Vec<BoundingBox>,
    pub features: Vec<FeatureVector>,
    pub h1: Vec<f64>,
}

/// Relative offsets of the extra first-frame samples around the initial box.
const SEED_OFFSETS: [f64; 5] = [-0.1, -0.05, 0.0, 0.05, 0.1];


/// Active co-tracker state: short-term KNN, long-term SVM and the current estimate.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    knn: KnnModel,
    history: LabeledStore,
    svm: SvmModel,
    alpha: (f64, f64),
    estimate: BoundingBox,
    frame_dims: (usize, usize),
    t: usize,
}

impl Tracker {
    /// Seeds both classifiers from the first frame.
    ///
    /// Candidates are the regular grid plus a small jitter set around `init`.
    /// Those overlapping `init` by more than `init_positive_iou` become
    /// positives, those below `init_negative_iou` negatives; the rest are
    /// discarded.
    pub fn new(config: TrackerConfig, first: &Frame, init: BoundingBox) -> Result<Self> {
        config.validate()?;
        let dims = (first.width, first.height);
        let grid = make_grid(&init, dims, config.n_samples, &config.scales)?;
        let mut boxes = grid.boxes();
        for dy in SEED_OFFSETS {
            for dx in SEED_OFFSETS {
                boxes.push(BoundingBox { x: init.x + dx * init.w, y: init.y + dy * init.h, ..init });
            }
        }
        let dim = config.features.feature_len();
        let mut knn = KnnModel::new(config.knn_k, config.window, dim);
        let mut history = LabeledStore::new(Retention::Unbounded, dim);
        let mut seeded = Vec::new();
        for b in boxes {
            let overlap = iou(&b, &init);
            let label = if overlap > config.init_positive_iou {
                Label::Positive
            } else if overlap < config.init_negative_iou {
                Label::Negative
            } else {
                continue;
            };
            if b.clip(dims.0 as f64, dims.1 as f64).is_none() {
                continue;
            }
            seeded.push((extract_features(first, &b, &config.features)?, label));
        }
        knn.update(1, seeded.iter().map(|(f, l)| (f, *l)));
        for (f, l) in &seeded {
            history.push(1, f, *l);
        }
        let (svm, _) = SvmModel::train(&history, &config.svm, mix_seed(config.seed, 1), 1)?;
        Ok(Self { config, knn, history, svm, alpha: (0.5, 0.5), estimate: init, frame_dims: dims, t: 1 })
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn estimate(&self) -> BoundingBox {
        self.estimate
    }

    pub fn knn(&self) -> &KnnModel {
        &self.knn
    }

    pub fn svm(&self) -> &SvmModel {
        &self.svm
    }

    pub fn history(&self) -> &LabeledStore {
        &self.history
    }

    /// Samples and featurizes candidates around the current estimate and
    /// scores them with the main classifier.
    pub fn observe(&self, frame: &Frame) -> Result<Observation> {
        if (frame.width, frame.height) != self.frame_dims {
            return Err(Error::data(format!("frame {}", frame.index), "frame size changed mid-sequence"));
        }
        let grid = make_grid(&self.estimate, self.frame_dims, self.config.n_samples, &self.config.scales)?;
        let boxes = grid.boxes();
        let features = boxes
            .iter()
            .map(|b| extract_features(frame, b, &self.config.features))
            .collect::<Result<Vec<_>>>()?;
        let h1 = features.iter().map(|f| self.knn.score(f)).collect::<Result<Vec<_>>>()?;
        Ok(Observation { index: frame.index, boxes, features, h1 })
    }

    /// Labels an observation, updates both classifiers on their schedules
    /// and moves the estimate. `margin` is used by the active modes; for
    /// [`LabelingMode::ActiveFixed`] it defaults to the configured margin.
    pub fn commit(&mut self, obs: Observation, margin: Option<f64>) -> Result<FrameResult> {
        let tau = self.config.tau;
        let mode = self.config.mode;
        let margin = match mode {
            LabelingMode::ActiveFixed => Some(margin.unwrap_or(self.config.fixed_margin)),
            LabelingMode::ActiveQlearn => {
                Some(margin.ok_or_else(|| Error::config("mode", "active-qlearn needs a margin per frame"))?)
            }
            _ => None,
        };
        let svm = &self.svm;
        let mut samples = Vec::with_capacity(obs.h1.len());
        for ((bbox, features), h1) in obs.boxes.into_iter().zip(obs.features).zip(obs.h1) {
            let (label, h2, source, decisive) = match mode {
                LabelingMode::Single => (label_single(h1, tau), None, LabelSource::Main, h1),
                LabelingMode::Cotrack => {
                    let h2 = svm.score(&features);
                    let (label, source) = label_cotrack(h1, h2, self.alpha, tau);
                    let decisive = match source {
                        LabelSource::Main => h1,
                        LabelSource::Aux => h2,
                        LabelSource::Vote => self.alpha.0 * h1 + self.alpha.1 * h2,
                    };
                    (label, Some(h2), source, decisive)
                }
                LabelingMode::ActiveFixed | LabelingMode::ActiveQlearn => {
                    let m = margin.expect("active modes carry a margin");
                    let (label, h2, source) = label_active(h1, tau, m, || Ok(svm.score(&features)))?;
                    (label, h2, source, h2.unwrap_or(h1))
                }
            };
            samples.push(ScoredSample { bbox, features, h1, h2, label, source, decisive_score: decisive });
        }
        let n = samples.len().max(1) as f64;
        let queried = samples.iter().filter(|s| s.source != LabelSource::Main).count();
        let queried_fraction = queried as f64 / n;
        self.alpha = update_alpha(&samples, tau, self.alpha);

        let (estimate, lost) = estimate_target(&samples, self.estimate);
        let t = obs.index;
        if !lost {
            self.knn.update(t, samples.iter().map(|s| (&s.features, s.label)));
            for s in &samples {
                self.history.push(t, &s.features, s.label);
            }
            if schedule_aux_update(t, self.config.window) {
                self.svm = SvmModel::train(&self.history, &self.config.svm, mix_seed(self.config.seed, t as u64), t)?.0;
            }
            let (w, h) = self.frame_dims;
            // keep the center inside the frame so the next search region is never empty
            let (cx, cy) = estimate.center();
            self.estimate = BoundingBox::from_center(cx.clamp(0.0, w as f64), cy.clamp(0.0, h as f64), estimate.w, estimate.h)
                .unwrap_or(estimate);
        }
        self.t = t;
        Ok(FrameResult {
            index: t,
            estimate: self.estimate,
            samples,
            queried_fraction,
            margin,
            alpha: self.alpha,
            lost,
        })
    }

    pub fn step(&mut self, frame: &Frame, selector: Option<&dyn MarginSelector>) -> Result<FrameResult> {
        let obs = self.observe(frame)?;
        let margin = match (self.config.mode, selector) {
            (LabelingMode::ActiveQlearn, Some(sel)) => Some(sel.select_margin(&obs.h1, self.config.tau)),
            (LabelingMode::ActiveQlearn, None) => {
                return Err(Error::config("mode", "active-qlearn needs a Q-table"));
            }
            _ => None,
        };
        self.commit(obs, margin)
    }
}

/// Result row for the initialization frame.
pub fn initial_result(init: BoundingBox) -> FrameResult {
    FrameResult {
        index: 1,
        estimate: init,
        samples: Vec::new(),
        queried_fraction: 0.0,
        margin: None,
        alpha: (0.5, 0.5),
        lost: false,
    }
}

/// Tracks a whole sequence from its first-frame ground truth. Returns one
/// result per frame plus the time spent in the tracker itself (frame
/// decoding excluded).
pub fn track_sequence_timed(
    seq: &Sequence,
    config: &TrackerConfig,
    selector: Option<&dyn MarginSelector>,
) -> Result<(Vec<FrameResult>, Duration)> {
    let init = seq.initial_box()?;
    if config.mode == LabelingMode::ActiveQlearn && selector.is_none() {
        return Err(Error::config("mode", "active-qlearn needs a Q-table"));
    }
    let first = seq.frame(1)?;
    let start = Instant::now();
    let mut tracker = Tracker::new(config.clone(), &first, init)?;
    let mut elapsed = start.elapsed();
    let mut results = Vec::with_capacity(seq.len());
    results.push(initial_result(init));
    for i in 2..=seq.len() {
        let frame = seq.frame(i)?;
        let start = Instant::now();
        results.push(tracker.step(&frame, selector)?);
        elapsed += start.elapsed();
    }
    Ok((results, elapsed))
}

pub fn track_sequence(
    seq: &Sequence,
    config: &TrackerConfig,
    selector: Option<&dyn MarginSelector>,
) -> Result<Vec<FrameResult>> {
    track_sequence_timed(seq, config, selector).map(|(r, _)| r)
}
