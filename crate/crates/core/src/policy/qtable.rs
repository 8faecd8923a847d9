//! Tabular action values over the discrete uncertainty states.

use std::collections::BTreeMap;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::engine::MarginSelector;
use crate::error::{Error, Result};
use crate::io::write_atomic;
use crate::seed::mix_seed;

use super::state::{state_of, StateKey};

const FORMAT_VERSION: u32 = 1;
const INIT_STD: f64 = 0.01;
const MAX_MARGIN: f64 = 0.5;

/// Evenly spaced margins from 0 to 0.5 inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ActionSet {
    n: usize,
}

impl ActionSet {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::config("policy.n_actions", "must be at least 2"));
        }
        Ok(Self { n })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn margin(&self, action: usize) -> f64 {
        assert!(action < self.n, "action {action} out of range");
        action as f64 * MAX_MARGIN / (self.n - 1) as f64
    }

    pub fn margins(&self) -> Vec<f64> {
        (0..self.n).map(|a| self.margin(a)).collect()
    }

    /// Index used when nothing is known about a state.
    pub fn middle(&self) -> usize {
        self.n / 2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QRow {
    pub q: Vec<f64>,
    pub n: Vec<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct QTable {
    n_actions: usize,
    gamma: f64,
    seed: u64,
    /// Episodes trained so far; lets a resumed run continue the episode stream.
    pub episodes: u64,
    rows: BTreeMap<StateKey, QRow>,
}

#[derive(Serialize, Deserialize)]
struct StoredRow {
    state: StateKey,
    q: Vec<f64>,
    n: Vec<u64>,
}

#[derive(Serialize, Deserialize)]
struct StoredTable {
    version: u32,
    n_a: usize,
    gamma: f64,
    seed: u64,
    #[serde(default)]
    episodes: u64,
    rows: Vec<StoredRow>,
}

fn argmax(q: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in q.iter().enumerate().skip(1) {
        if v > q[best] {
            best = i;
        }
    }
    best
}

impl QTable {
    pub fn new(n_actions: usize, gamma: f64, seed: u64) -> Result<Self> {
        ActionSet::new(n_actions)?;
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::config("policy.gamma", "must lie in (0, 1]"));
        }
        Ok(Self { n_actions, gamma, seed, episodes: 0, rows: BTreeMap::new() })
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn actions(&self) -> ActionSet {
        ActionSet { n: self.n_actions }
    }

    /// Visited rows in state order.
    pub fn rows(&self) -> impl Iterator<Item = (&StateKey, &QRow)> {
        self.rows.iter()
    }

    pub fn row(&self, state: &StateKey) -> Option<&QRow> {
        self.rows.get(state)
    }

    /// Fresh row for `state`: small positive values, a pure function of the
    /// table seed and the state.
    fn initial_row(&self, state: &StateKey) -> QRow {
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(self.seed, state.index() as u64));
        let normal = Normal::new(0.0, INIT_STD).expect("valid normal");
        let q = (0..self.n_actions).map(|_| normal.sample(&mut rng).abs()).collect();
        QRow { q, n: vec![0; self.n_actions] }
    }

    pub fn row_mut(&mut self, state: &StateKey) -> &mut QRow {
        if !self.rows.contains_key(state) {
            let row = self.initial_row(state);
            self.rows.insert(*state, row);
        }
        self.rows.get_mut(state).expect("row just inserted")
    }

    /// Action value, materializing the row on first access.
    pub fn q(&mut self, state: &StateKey, action: usize) -> f64 {
        self.row_mut(state).q[action]
    }

    pub fn visits(&self, state: &StateKey, action: usize) -> u64 {
        self.rows.get(state).map_or(0, |r| r.n[action])
    }

    fn apply(&mut self, state: &StateKey, action: usize, target: f64, lr: f64) {
        let row = self.row_mut(state);
        row.q[action] += lr * (target - row.q[action]);
        row.n[action] += 1;
    }

    /// Q-learning backup; `next == None` marks a terminal transition.
    pub fn q_update(&mut self, state: &StateKey, action: usize, reward: f64, next: Option<&StateKey>, lr: f64) {
        let target = match next {
            Some(s) => {
                let best = self.row_mut(s).q.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                reward + self.gamma * best
            }
            None => reward,
        };
        self.apply(state, action, target, lr);
    }

    /// SARSA backup from the next action actually chosen.
    pub fn sarsa_update(&mut self, state: &StateKey, action: usize, reward: f64, next: Option<(&StateKey, usize)>, lr: f64) {
        let target = match next {
            Some((s, a)) => reward + self.gamma * self.q(s, a),
            None => reward,
        };
        self.apply(state, action, target, lr);
    }

    /// Boltzmann-Gumbel exploration: argmax of `Q + β·G` with
    /// `β = C / sqrt(N + 1)` per action and standard Gumbel noise `G`.
    /// Ties go to the lowest index; with `C = 0` this is the plain argmax.
    pub fn select_action_bge(&mut self, state: &StateKey, exploration: f64, rng: &mut impl Rng) -> usize {
        let row = self.row_mut(state);
        let perturbed: Vec<f64> = row
            .q
            .iter()
            .zip(&row.n)
            .map(|(&q, &n)| {
                let u: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let g = -(-u.ln()).ln();
                let beta = exploration / ((n + 1) as f64).sqrt();
                if beta == 0.0 {
                    q
                } else {
                    q + beta * g
                }
            })
            .collect();
        argmax(&perturbed)
    }

    /// Greedy action. Unvisited states and rows with no preference fall back
    /// to the middle action.
    pub fn select_action_greedy(&self, state: &StateKey) -> usize {
        let fallback = self.actions().middle();
        let Some(row) = self.rows.get(state) else { return fallback };
        if row.q.iter().all(|&v| v == row.q[0]) {
            return fallback;
        }
        argmax(&row.q)
    }

    pub fn to_json(&self) -> Result<String> {
        let stored = StoredTable {
            version: FORMAT_VERSION,
            n_a: self.n_actions,
            gamma: self.gamma,
            seed: self.seed,
            episodes: self.episodes,
            rows: self.rows.iter().map(|(s, r)| StoredRow { state: *s, q: r.q.clone(), n: r.n.clone() }).collect(),
        };
        Ok(serde_json::to_string_pretty(&stored)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let stored: StoredTable = serde_json::from_str(text)?;
        if stored.version != FORMAT_VERSION {
            return Err(Error::Snapshot(format!("unsupported Q-table version {}", stored.version)));
        }
        let mut table = QTable::new(stored.n_a, stored.gamma, stored.seed)?;
        table.episodes = stored.episodes;
        for row in stored.rows {
            if !row.state.is_valid() {
                return Err(Error::Snapshot(format!("state {} out of range", row.state)));
            }
            if row.q.len() != stored.n_a || row.n.len() != stored.n_a {
                return Err(Error::Snapshot(format!("row {} does not have {} actions", row.state, stored.n_a)));
            }
            if table.rows.insert(row.state, QRow { q: row.q, n: row.n }).is_some() {
                return Err(Error::Snapshot(format!("duplicate row {}", row.state)));
            }
        }
        Ok(table)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_atomic(path, self.to_json()?.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            Error::Json(j) => Error::data(path, format!("not a Q-table: {j}")),
            Error::Snapshot(s) => Error::data(path, s),
            other => other,
        })
    }
}

/// Picks each frame's margin greedily from a trained table.
#[derive(Debug, Clone)]
pub struct GreedyPolicy {
    table: QTable,
    n_bins: usize,
}

impl GreedyPolicy {
    pub fn new(table: QTable, n_bins: usize) -> Self {
        Self { table, n_bins }
    }

    pub fn table(&self) -> &QTable {
        &self.table
    }

    pub fn action_for(&self, h1: &[f64], tau: f64) -> usize {
        match state_of(h1, tau, self.n_bins) {
            Ok(s) => self.table.select_action_greedy(&s),
            Err(_) => self.table.actions().middle(),
        }
    }
}

impl MarginSelector for GreedyPolicy {
    fn select_margin(&self, h1: &[f64], tau: f64) -> f64 {
        self.table.actions().margin(self.action_for(h1, tau))
    }
}
