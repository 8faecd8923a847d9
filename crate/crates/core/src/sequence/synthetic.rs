//! Seeded synthetic sequences: a textured rectangle moving over a blocky
//! background, with scripted occlusion and illumination events.
//!
//! Scripts are TOML documents:
//!
//! ```toml
//! seed = 7
//! length = 100
//! width = 160            # default 160
//! height = 120           # default 120
//! annotation_stride = 25 # default 1 (dense)
//!
//! [target]
//! width = 24
//! height = 24
//! speed = 1.0                        # pixels per frame
//! waypoints = [[40, 40], [120, 80]]  # successive target centers
//!
//! [background]
//! block_size = 8
//! noise = 6
//!
//! [[occlusions]]
//! start = 30
//! duration = 8
//! coverage = 1.0   # fraction of the target width hidden, from the left edge
//!
//! [[illumination]]
//! start = 60
//! duration = 20
//! gain = 0.7
//! ```
//!
//! Frame 1 and every frame whose index is a multiple of `annotation_stride`
//! carry ground truth.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

use super::{Attribute, Frame, Sequence};

fn default_width() -> usize {
    160
}

fn default_height() -> usize {
    120
}

fn default_stride() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetPath {
    pub width: usize,
    pub height: usize,
    pub speed: f64,
    pub waypoints: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OcclusionEvent {
    pub start: usize,
    pub duration: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IlluminationEvent {
    pub start: usize,
    pub duration: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackgroundSpec {
    pub block_size: usize,
    /// Per-pixel sensor noise amplitude, in intensity levels.
    pub noise: u8,
}

impl Default for BackgroundSpec {
    fn default() -> Self {
        Self { block_size: 8, noise: 6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SyntheticScript {
    pub seed: u64,
    pub length: usize,
    #[serde(default = "default_width")]
    pub width: usize,
    #[serde(default = "default_height")]
    pub height: usize,
    #[serde(default = "default_stride")]
    pub annotation_stride: usize,
    pub target: TargetPath,
    #[serde(default)]
    pub background: BackgroundSpec,
    #[serde(default)]
    pub occlusions: Vec<OcclusionEvent>,
    #[serde(default)]
    pub illumination: Vec<IlluminationEvent>,
}

fn active(start: usize, duration: usize, t: usize) -> bool {
    t >= start && t < start + duration
}

impl SyntheticScript {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let script: SyntheticScript =
            toml::from_str(text).map_err(|e| Error::config("script", e.message().to_string()))?;
        script.validate()?;
        Ok(script)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("script is always representable as TOML")
    }

    pub fn validate(&self) -> Result<()> {
        if self.length == 0 {
            return Err(Error::config("length", "synthetic sequence needs at least one frame"));
        }
        if self.annotation_stride == 0 {
            return Err(Error::config("annotation_stride", "must be at least 1"));
        }
        let t = &self.target;
        if t.width == 0 || t.height == 0 || t.width > self.width || t.height > self.height {
            return Err(Error::config("target", "target size must be positive and fit inside the frame"));
        }
        if !(t.speed >= 0.0 && t.speed.is_finite()) {
            return Err(Error::config("target.speed", "must be a non-negative number"));
        }
        if t.waypoints.is_empty() || t.waypoints.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::config("target.waypoints", "need at least one finite waypoint"));
        }
        if self.background.block_size == 0 {
            return Err(Error::config("background.block_size", "must be at least 1"));
        }
        let in_range = |start: usize, duration: usize| {
            start >= 1 && duration >= 1 && start + duration - 1 <= self.length
        };
        for e in &self.occlusions {
            if !in_range(e.start, e.duration) {
                return Err(Error::config("occlusions", "event must lie within [1, length]"));
            }
            if !(0.0..=1.0).contains(&e.coverage) {
                return Err(Error::config("occlusions.coverage", "must lie in [0, 1]"));
            }
        }
        for e in &self.illumination {
            if !in_range(e.start, e.duration) {
                return Err(Error::config("illumination", "event must lie within [1, length]"));
            }
            if !(e.gain > 0.0 && e.gain.is_finite()) {
                return Err(Error::config("illumination.gain", "must be positive"));
            }
        }
        Ok(())
    }

    /// Integer target boxes, one per frame, kept inside the frame.
    pub fn trajectory(&self) -> Vec<BoundingBox> {
        let t = &self.target;
        let (tw, th) = (t.width as f64, t.height as f64);
        let max_x = (self.width - t.width) as f64;
        let max_y = (self.height - t.height) as f64;
        let mut pos = t.waypoints[0];
        let mut next = 1;
        let mut boxes = Vec::with_capacity(self.length);
        for frame in 0..self.length {
            if frame > 0 {
                let mut budget = t.speed;
                while budget > 0.0 && next < t.waypoints.len() {
                    let goal = t.waypoints[next];
                    let (dx, dy) = (goal[0] - pos[0], goal[1] - pos[1]);
                    let dist = dx.hypot(dy);
                    if dist <= budget {
                        pos = goal;
                        budget -= dist;
                        next += 1;
                    } else {
                        pos = [pos[0] + dx / dist * budget, pos[1] + dy / dist * budget];
                        budget = 0.0;
                    }
                }
            }
            let x = (pos[0] - tw / 2.0).round().clamp(0.0, max_x);
            let y = (pos[1] - th / 2.0).round().clamp(0.0, max_y);
            boxes.push(BoundingBox { x, y, w: tw, h: th });
        }
        boxes
    }

    fn attributes(&self) -> BTreeSet<Attribute> {
        let mut tags = BTreeSet::new();
        if !self.occlusions.is_empty() {
            tags.insert(Attribute::OCC);
        }
        if !self.illumination.is_empty() {
            tags.insert(Attribute::IV);
        }
        tags
    }

    /// Randomized script for training and evaluation suites.
    pub fn random(seed: u64, spec: &RandomScriptSpec) -> SyntheticScript {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(7);
        let size = rng.random_range(spec.target_size.0..=spec.target_size.1);
        let (w, h) = (spec.width as f64, spec.height as f64);
        let half = size as f64 / 2.0;
        let margin = half + 2.0;
        let n_way = rng.random_range(2..=4);
        let waypoints = (0..n_way)
            .map(|_| [rng.random_range(margin..w - margin), rng.random_range(margin..h - margin)])
            .collect();
        let speed = rng.random_range(spec.speed.0..=spec.speed.1);
        let len = spec.length;

        let mut occlusions = Vec::new();
        if spec.full_occlusion {
            let duration = rng.random_range(spec.full_occlusion_frames.0..=spec.full_occlusion_frames.1).min(len);
            let lo = (len * 3 / 10).max(2);
            let hi = (len * 6 / 10).max(lo).min(len + 1 - duration);
            let start = rng.random_range(lo.min(hi)..=hi);
            occlusions.push(OcclusionEvent { start, duration, coverage: 1.0 });
        }
        for _ in 0..spec.partial_occlusions {
            let duration = rng.random_range(5..=20usize).min(len);
            let hi = len + 1 - duration;
            let start = rng.random_range(2.min(hi)..=hi);
            let coverage = rng.random_range(0.3..0.7);
            occlusions.push(OcclusionEvent { start, duration, coverage });
        }
        let mut illumination = Vec::new();
        if rng.random_bool(spec.illumination_probability) {
            let duration = rng.random_range(10..=30usize).min(len);
            let start = rng.random_range(1..=(len + 1 - duration).max(1));
            let gain = rng.random_range(0.65..1.35);
            illumination.push(IlluminationEvent { start, duration, gain });
        }
        SyntheticScript {
            seed,
            length: len,
            width: spec.width,
            height: spec.height,
            annotation_stride: spec.annotation_stride,
            target: TargetPath { width: size, height: size, speed, waypoints },
            background: BackgroundSpec::default(),
            occlusions,
            illumination,
        }
    }
}

/// Distribution of [`SyntheticScript::random`] scripts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RandomScriptSpec {
    pub length: usize,
    pub annotation_stride: usize,
    pub width: usize,
    pub height: usize,
    /// Inclusive side range of the square target.
    pub target_size: (usize, usize),
    pub speed: (f64, f64),
    pub full_occlusion: bool,
    pub full_occlusion_frames: (usize, usize),
    pub partial_occlusions: usize,
    pub illumination_probability: f64,
}

impl Default for RandomScriptSpec {
    fn default() -> Self {
        Self {
            length: 400,
            annotation_stride: 25,
            width: 160,
            height: 120,
            target_size: (20, 30),
            speed: (0.3, 1.2),
            full_occlusion: true,
            full_occlusion_frames: (4, 10),
            partial_occlusions: 1,
            illumination_probability: 0.5,
        }
    }
}

type Rgb = [u8; 3];

fn jitter(rng: &mut ChaCha8Rng, base: [i32; 3], spread: i32) -> Rgb {
    let mut out = [0u8; 3];
    for (o, b) in out.iter_mut().zip(base) {
        *o = (b + rng.random_range(-spread..=spread)).clamp(0, 255) as u8;
    }
    out
}

const BACKGROUND_PALETTE: [[i32; 3]; 4] = [[60, 140, 70], [60, 100, 170], [115, 120, 125], [40, 90, 110]];
const TARGET_PALETTE: [[i32; 3]; 3] = [[215, 45, 40], [240, 140, 30], [235, 215, 60]];
const OCCLUDER_PALETTE: [[i32; 3]; 3] = [[130, 50, 160], [125, 80, 40], [30, 30, 35]];

fn texture(rng: &mut ChaCha8Rng, w: usize, h: usize, cell: usize, palette: &[[i32; 3]], spread: i32) -> Vec<Rgb> {
    let cw = w.div_ceil(cell);
    let ch = h.div_ceil(cell);
    let cells: Vec<Rgb> = (0..cw * ch)
        .map(|_| {
            let base = palette[rng.random_range(0..palette.len())];
            jitter(rng, base, spread)
        })
        .collect();
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let c = cells[(y / cell) * cw + x / cell];
            out.push(jitter(rng, c.map(i32::from), 8));
        }
    }
    out
}

/// Renders a script. Pure function of the script.
pub fn generate_synthetic(script: &SyntheticScript) -> Result<Sequence> {
    script.validate()?;
    let (fw, fh) = (script.width, script.height);
    let (tw, th) = (script.target.width, script.target.height);

    let stream_rng = |stream: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(script.seed);
        rng.set_stream(stream);
        rng
    };
    let background = texture(&mut stream_rng(1), fw, fh, script.background.block_size, &BACKGROUND_PALETTE, 25);
    let target_tex = texture(&mut stream_rng(2), tw, th, 4, &TARGET_PALETTE, 15);
    let occluder_tex = texture(&mut stream_rng(3), tw, th, 6, &OCCLUDER_PALETTE, 15);

    let boxes = script.trajectory();
    let noise = i32::from(script.background.noise);
    let mut frames = Vec::with_capacity(script.length);
    for (i, b) in boxes.iter().enumerate() {
        let t = i + 1;
        let mut img: Vec<Rgb> = background.clone();
        let (bx, by) = (b.x as usize, b.y as usize);
        for y in 0..th {
            let row = (by + y) * fw + bx;
            img[row..row + tw].copy_from_slice(&target_tex[y * tw..(y + 1) * tw]);
        }
        for occ in script.occlusions.iter().filter(|e| active(e.start, e.duration, t)) {
            let cover = ((occ.coverage * tw as f64).round() as usize).min(tw);
            for y in 0..th {
                let row = (by + y) * fw + bx;
                img[row..row + cover].copy_from_slice(&occluder_tex[y * tw..y * tw + cover]);
            }
        }
        let gain: f64 = script
            .illumination
            .iter()
            .filter(|e| active(e.start, e.duration, t))
            .map(|e| e.gain)
            .product();

        let mut rng = stream_rng(1000 + t as u64);
        let mut pixels = Vec::with_capacity(fw * fh * 3);
        for px in img {
            for c in px {
                let mut v = i32::from(c);
                if noise > 0 {
                    v += rng.random_range(-noise..=noise);
                }
                let v = (f64::from(v.clamp(0, 255)) * gain).round().clamp(0.0, 255.0);
                pixels.push(v as u8);
            }
        }
        frames.push(Frame::new(t, fw, fh, pixels)?);
    }

    let stride = script.annotation_stride;
    let ground_truth = boxes
        .iter()
        .enumerate()
        .map(|(i, b)| {
            let t = i + 1;
            (t == 1 || t % stride == 0).then_some(*b)
        })
        .collect();
    Sequence::from_frames(format!("synthetic-{}", script.seed), frames, ground_truth, script.attributes())
}
