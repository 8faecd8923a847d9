//! JSON-lines form of per-frame results, one object per frame:
//! `{"index":2,"estimate":{"x":..,"y":..,"w":..,"h":..},"delta":0.25,"queried_fraction":0.1,"lost":false}`.
//! `delta` is `null` in modes without an uncertainty margin.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

use super::tracker::FrameResult;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrameRecord {
    pub index: usize,
    pub estimate: BoundingBox,
    pub delta: Option<f64>,
    pub queried_fraction: f64,
    pub lost: bool,
}

impl From<&FrameResult> for FrameRecord {
    fn from(r: &FrameResult) -> Self {
        Self { index: r.index, estimate: r.estimate, delta: r.margin, queried_fraction: r.queried_fraction, lost: r.lost }
    }
}

pub fn to_jsonl<'a>(records: impl IntoIterator<Item = &'a FrameRecord>) -> String {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    out
}

pub fn from_jsonl(text: &str) -> Result<Vec<FrameRecord>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| Error::data(format!("results line {}", i + 1), e.to_string()))
        })
        .collect()
}
