//! Learned choice of the per-frame uncertainty margin.

mod qtable;
mod reward;
mod state;
mod training;

pub use qtable::{ActionSet, GreedyPolicy, QRow, QTable};
pub use reward::{reward, RewardTracker, HIGH_OVERLAP, LOSS_PENALTY, LOW_OVERLAP};
pub use state::{
    build_histogram, classify_shape, featurize_state, histogram_moments, state_of, uncertainty, ShapeClass,
    StateKey, UncertaintyHistogram, MEAN_BINS, VAR_BINS,
};
pub use training::{
    episode_log_csv, train_policy, ClipSource, Environment, EpisodeLog, EpisodeSource, FixedSource,
    SyntheticSource, TrackingEnv, Transition,
};
