//! Active co-tracking: a short-term KNN classifier labels sampled
//! candidates and defers the uncertain ones to a long-term linear SVM. The
//! uncertainty margin is either fixed or chosen per frame by a tabular
//! Q-learned policy.

pub mod bench;
pub mod classifiers;
pub mod config;
pub mod engine;
pub mod error;
pub mod features;
pub mod geometry;
pub mod io;
pub mod policy;
pub mod seed;
pub mod sequence;

pub use config::{Config, LabelingMode, PolicyConfig, TrackerConfig};
pub use error::{Error, Result};
pub use geometry::{center_error, iou, BoundingBox};
