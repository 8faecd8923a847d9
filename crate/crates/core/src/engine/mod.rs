//! The per-frame tracking loop: sample, score, label, update, estimate.

mod labeling;
mod record;
mod tracker;

pub use labeling::{
    estimate_target, label_active, label_cotrack, label_single, schedule_aux_update, update_alpha, LabelSource,
    ScoredSample,
};
pub use record::{from_jsonl, to_jsonl, FrameRecord};
pub use tracker::{
    initial_result, track_sequence, track_sequence_timed, FrameResult, MarginSelector, Observation, Tracker,
};
