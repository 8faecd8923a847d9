//! Episodic training of the margin policy.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{LabelingMode, PolicyConfig, TrackerConfig, UpdateRule};
use crate::engine::{Observation, Tracker};
use crate::error::{Error, Result};
use crate::geometry::iou;
use crate::seed::mix_seed;
use crate::sequence::{generate_synthetic, RandomScriptSpec, Sequence, SyntheticScript};

use super::qtable::{ActionSet, QTable};
use super::reward::RewardTracker;
use super::state::{state_of, StateKey};

/// Outcome of one environment step.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub reward: f64,
    /// `None` once the episode is over.
    pub next: Option<StateKey>,
    /// Overlap with the ground truth, on annotated steps.
    pub iou: Option<f64>,
    pub queried_fraction: f64,
}

pub trait Environment {
    /// Starts episode `episode` and returns its first state.
    fn reset(&mut self, episode: u64) -> Result<StateKey>;
    fn step(&mut self, action: usize) -> Result<Transition>;
}

/// Supplies one sequence per episode.
pub trait EpisodeSource {
    fn episode(&mut self, index: u64) -> Result<Sequence>;
}

/// Fresh random synthetic sequence per episode; never runs out.
#[derive(Debug, Clone)]
pub struct SyntheticSource {
    pub spec: RandomScriptSpec,
    pub seed: u64,
}

impl EpisodeSource for SyntheticSource {
    fn episode(&mut self, index: u64) -> Result<Sequence> {
        generate_synthetic(&SyntheticScript::random(mix_seed(self.seed, index), &self.spec))
    }
}

/// Random clips of fixed length from a pool of annotated sequences.
/// Ground truth inside a clip is thinned to every `stride`-th frame.
#[derive(Debug, Clone)]
pub struct ClipSource {
    pool: Vec<Sequence>,
    clip_len: usize,
    stride: usize,
    seed: u64,
}

impl ClipSource {
    pub fn new(pool: Vec<Sequence>, clip_len: usize, stride: usize, seed: u64) -> Result<Self> {
        if clip_len < 2 || stride == 0 {
            return Err(Error::config("clip", "clips need at least 2 frames and a positive stride"));
        }
        let pool: Vec<Sequence> = pool.into_iter().filter(|s| s.len() >= clip_len).collect();
        if pool.is_empty() {
            return Err(Error::EmptyInput("no sequence is long enough for a clip"));
        }
        Ok(Self { pool, clip_len, stride, seed })
    }
}

impl EpisodeSource for ClipSource {
    fn episode(&mut self, index: u64) -> Result<Sequence> {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, index));
        for _ in 0..100 {
            let seq = &self.pool[rng.random_range(0..self.pool.len())];
            let start = rng.random_range(1..=seq.len() + 1 - self.clip_len);
            if seq.ground_truth_at(start).is_none() {
                continue;
            }
            let mut clip = seq.clip(start, self.clip_len)?;
            for (i, gt) in clip.ground_truth.iter_mut().enumerate() {
                if i % self.stride != 0 {
                    *gt = None;
                }
            }
            return Ok(clip);
        }
        Err(Error::EmptyInput("could not find an annotated clip start"))
    }
}

/// Plays a fixed list of sequences once each.
#[derive(Debug, Clone)]
pub struct FixedSource(pub Vec<Sequence>);

impl EpisodeSource for FixedSource {
    fn episode(&mut self, index: u64) -> Result<Sequence> {
        self.0.get(index as usize).cloned().ok_or(Error::EnvironmentExhausted(self.0.len()))
    }
}

struct Episode {
    seq: Sequence,
    tracker: Tracker,
    pending: Observation,
    rewards: RewardTracker,
}

/// The tracker as an environment: one step per frame, the action picks the
/// margin, and annotated frames pay according to their overlap.
pub struct TrackingEnv<S> {
    source: S,
    tracker_config: TrackerConfig,
    policy: PolicyConfig,
    actions: ActionSet,
    current: Option<Episode>,
}

impl<S: EpisodeSource> TrackingEnv<S> {
    pub fn new(source: S, tracker_config: TrackerConfig, policy: PolicyConfig) -> Result<Self> {
        let tracker_config = TrackerConfig { mode: LabelingMode::ActiveQlearn, ..tracker_config };
        tracker_config.validate()?;
        policy.validate()?;
        let actions = ActionSet::new(policy.n_actions)?;
        Ok(Self { source, tracker_config, policy, actions, current: None })
    }

    fn state(&self, obs: &Observation) -> Result<StateKey> {
        state_of(&obs.h1, self.tracker_config.tau, self.policy.n_bins)
    }
}

impl<S: EpisodeSource> Environment for TrackingEnv<S> {
    fn reset(&mut self, episode: u64) -> Result<StateKey> {
        self.current = None;
        let seq = self.source.episode(episode)?;
        if seq.len() < 2 {
            return Err(Error::data(&seq.name, "an episode needs at least two frames"));
        }
        let init = seq.initial_box()?;
        let config = TrackerConfig { seed: mix_seed(self.tracker_config.seed, episode), ..self.tracker_config.clone() };
        let tracker = Tracker::new(config, &*seq.frame(1)?, init)?;
        let pending = tracker.observe(&*seq.frame(2)?)?;
        let state = self.state(&pending)?;
        let rewards = RewardTracker::new(self.policy.high_overlap_reward, self.policy.loss_streak);
        self.current = Some(Episode { seq, tracker, pending, rewards });
        Ok(state)
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let margin = self.actions.margin(action);
        let ep = self.current.as_mut().ok_or(Error::EmptyInput("step called before reset"))?;
        let obs = std::mem::replace(
            &mut ep.pending,
            Observation { index: 0, boxes: Vec::new(), features: Vec::new(), h1: Vec::new() },
        );
        let result = ep.tracker.commit(obs, Some(margin))?;
        let t = result.index;
        let (reward, overlap) = match ep.seq.ground_truth_at(t) {
            Some(gt) => {
                let o = iou(&result.estimate, &gt);
                (ep.rewards.observe(o), Some(o))
            }
            None => (0.0, None),
        };
        let next = if t < ep.seq.len() {
            let frame = ep.seq.frame(t + 1)?;
            ep.pending = ep.tracker.observe(&frame)?;
            Some(state_of(&ep.pending.h1, self.tracker_config.tau, self.policy.n_bins)?)
        } else {
            self.current = None;
            None
        };
        Ok(Transition { reward, next, iou: overlap, queried_fraction: result.queried_fraction })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: u64,
    pub total_reward: f64,
    /// Mean overlap over the annotated steps; `None` if there were none.
    pub mean_iou: Option<f64>,
    pub queried_fraction: f64,
    pub steps: usize,
}

pub fn episode_log_csv(logs: &[EpisodeLog]) -> String {
    let mut out = String::from("episode,total_reward,mean_iou,queried_fraction\n");
    for l in logs {
        let iou = l.mean_iou.map(|v| v.to_string()).unwrap_or_default();
        let _ = writeln!(out, "{},{},{},{}", l.episode, l.total_reward, iou, l.queried_fraction);
    }
    out
}

/// Runs `episodes` episodes of tabular learning with Boltzmann-Gumbel
/// exploration. Episode numbering continues from `table.episodes`, so a
/// resumed run draws new episodes.
pub fn train_policy(
    env: &mut impl Environment,
    table: &mut QTable,
    config: &PolicyConfig,
    episodes: u64,
    mut on_episode: impl FnMut(&EpisodeLog),
) -> Result<Vec<EpisodeLog>> {
    config.validate()?;
    if table.n_actions() != config.n_actions {
        return Err(Error::config(
            "policy.n_actions",
            format!("table has {} actions, configuration {}", table.n_actions(), config.n_actions),
        ));
    }
    let mut logs = Vec::with_capacity(episodes as usize);
    for _ in 0..episodes {
        let episode = table.episodes;
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(config.seed ^ table.seed(), episode));
        let mut state = env.reset(episode)?;
        let mut action = table.select_action_bge(&state, config.exploration, &mut rng);
        let (mut total, mut iou_sum, mut iou_n, mut queried, mut steps) = (0.0, 0.0, 0usize, 0.0, 0usize);
        loop {
            let tr = env.step(action)?;
            steps += 1;
            total += tr.reward;
            queried += tr.queried_fraction;
            if let Some(o) = tr.iou {
                iou_sum += o;
                iou_n += 1;
            }
            let lr = 1.0 / (1.0 + table.visits(&state, action) as f64).powf(config.lr_exponent);
            let Some(next) = tr.next else {
                table.q_update(&state, action, tr.reward, None, lr);
                break;
            };
            let next_action = match config.update_rule {
                UpdateRule::QLearning => {
                    table.q_update(&state, action, tr.reward, Some(&next), lr);
                    table.select_action_bge(&next, config.exploration, &mut rng)
                }
                UpdateRule::Sarsa => {
                    let a = table.select_action_bge(&next, config.exploration, &mut rng);
                    table.sarsa_update(&state, action, tr.reward, Some((&next, a)), lr);
                    a
                }
            };
            state = next;
            action = next_action;
        }
        table.episodes += 1;
        let log = EpisodeLog {
            episode,
            total_reward: total,
            mean_iou: (iou_n > 0).then(|| iou_sum / iou_n as f64),
            queried_fraction: queried / steps as f64,
            steps,
        };
        on_episode(&log);
        logs.push(log);
    }
    Ok(logs)
}
