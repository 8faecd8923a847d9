use crate::config::HighOverlapReward;

pub const HIGH_OVERLAP: f64 = 0.9;
pub const LOW_OVERLAP: f64 = 0.5;
pub const LOSS_PENALTY: f64 = -3.0;

/// Reward of an annotated frame given its overlap with the ground truth and
/// the number of consecutive low-overlap annotated frames ending here.
pub fn reward(iou: f64, streak: usize, high: HighOverlapReward, loss_streak: usize) -> f64 {
    if iou > HIGH_OVERLAP {
        match high {
            HighOverlapReward::Scaled => 3.0 * iou,
            HighOverlapReward::Flat => 3.0,
        }
    } else if iou >= LOW_OVERLAP {
        iou
    } else if streak >= loss_streak {
        LOSS_PENALTY
    } else {
        0.0
    }
}

/// Tracks the low-overlap streak across the annotated frames of an episode.
#[derive(Debug, Clone)]
pub struct RewardTracker {
    streak: usize,
    high: HighOverlapReward,
    loss_streak: usize,
}

impl RewardTracker {
    pub fn new(high: HighOverlapReward, loss_streak: usize) -> Self {
        Self { streak: 0, high, loss_streak }
    }

    pub fn streak(&self) -> usize {
        self.streak
    }

    pub fn observe(&mut self, iou: f64) -> f64 {
        if iou < LOW_OVERLAP {
            self.streak += 1;
        } else {
            self.streak = 0;
        }
        reward(iou, self.streak, self.high, self.loss_streak)
    }
}
