//! Video sequences: frames, sparse ground truth and challenge tags.

mod otb;
mod synthetic;

use std::collections::BTreeSet;
use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;

pub use otb::{load_otb_sequence, parse_ground_truth, write_otb_sequence};
pub use synthetic::{
    generate_synthetic, IlluminationEvent, OcclusionEvent, RandomScriptSpec, SyntheticScript,
    TargetPath,
};

/// One RGB image, row-major, three bytes per pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    /// 1-based position in the sequence.
    pub index: usize,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Frame {
    pub fn new(index: usize, width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 || pixels.len() != width * height * 3 {
            return Err(Error::data(
                format!("frame {index}"),
                format!("{}x{} frame needs {} bytes, got {}", width, height, width * height * 3, pixels.len()),
            ));
        }
        Ok(Self { index, width, height, pixels })
    }

    #[inline]
    pub fn rgb(&self, x: usize, y: usize) -> [u8; 3] {
        let i = (y * self.width + x) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }

    /// Draws the outline of `b`, `thickness` pixels wide, clipped to the frame.
    pub fn draw_box(&mut self, b: &BoundingBox, rgb: [u8; 3], thickness: usize) {
        let Some(c) = b.clip(self.width as f64, self.height as f64) else { return };
        let x0 = c.x.floor() as usize;
        let y0 = c.y.floor() as usize;
        let x1 = (c.right().ceil() as usize).min(self.width) - 1;
        let y1 = (c.bottom().ceil() as usize).min(self.height) - 1;
        for y in y0..=y1 {
            for x in x0..=x1 {
                let edge = x < x0 + thickness || x + thickness > x1 || y < y0 + thickness || y + thickness > y1;
                if edge {
                    let i = (y * self.width + x) * 3;
                    self.pixels[i..i + 3].copy_from_slice(&rgb);
                }
            }
        }
    }

    pub fn save_png(&self, path: &std::path::Path) -> Result<()> {
        image::save_buffer(path, &self.pixels, self.width as u32, self.height as u32, image::ExtendedColorType::Rgb8)
            .map_err(|source| Error::Image { path: path.to_path_buf(), source })
    }
}

/// Challenge tags of the OTB benchmark.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Attribute {
    /// Illumination variation.
    IV,
    /// Scale variation.
    SV,
    /// In-plane rotation.
    IPR,
    /// Out-of-plane rotation.
    OPR,
    /// Deformation.
    DEF,
    /// Occlusion.
    OCC,
    /// Out of view.
    OV,
    /// Low resolution.
    LR,
    /// Background clutter.
    BC,
    /// Fast motion.
    FM,
    /// Motion blur.
    MB,
}

impl Attribute {
    pub const ALL: [Attribute; 11] = [
        Attribute::IV,
        Attribute::SV,
        Attribute::IPR,
        Attribute::OPR,
        Attribute::DEF,
        Attribute::OCC,
        Attribute::OV,
        Attribute::LR,
        Attribute::BC,
        Attribute::FM,
        Attribute::MB,
    ];
}

impl fmt::Display for Attribute {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl FromStr for Attribute {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Attribute::ALL
            .iter()
            .copied()
            .find(|a| a.to_string().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown attribute tag {s:?}"))
    }
}

/// Where frame pixels come from.
#[derive(Debug, Clone)]
pub(crate) enum FrameSource {
    Memory(Vec<Arc<Frame>>),
    /// Image files decoded on demand.
    Files(Vec<PathBuf>),
}

/// An ordered run of equally sized frames with optional per-frame ground truth.
#[derive(Debug, Clone)]
pub struct Sequence {
    pub name: String,
    frames: FrameSource,
    width: usize,
    height: usize,
    /// One entry per frame; `None` where the frame is not annotated.
    pub ground_truth: Vec<Option<BoundingBox>>,
    pub attributes: BTreeSet<Attribute>,
}

impl Sequence {
    /// Builds an in-memory sequence. `ground_truth` may be empty (no
    /// annotation at all) or hold exactly one entry per frame.
    pub fn from_frames(
        name: impl Into<String>,
        frames: Vec<Frame>,
        ground_truth: Vec<Option<BoundingBox>>,
        attributes: BTreeSet<Attribute>,
    ) -> Result<Self> {
        let name = name.into();
        let first = frames.first().ok_or(Error::EmptyInput("sequence has no frames"))?;
        let (width, height) = (first.width, first.height);
        if frames.iter().any(|f| f.width != width || f.height != height) {
            return Err(Error::data(&name, "frames differ in size"));
        }
        let frames: Vec<Arc<Frame>> = frames
            .into_iter()
            .enumerate()
            .map(|(i, mut f)| {
                f.index = i + 1;
                Arc::new(f)
            })
            .collect();
        Self::assemble(name, FrameSource::Memory(frames), width, height, ground_truth, attributes)
    }

    pub(crate) fn assemble(
        name: String,
        frames: FrameSource,
        width: usize,
        height: usize,
        mut ground_truth: Vec<Option<BoundingBox>>,
        attributes: BTreeSet<Attribute>,
    ) -> Result<Self> {
        let n = match &frames {
            FrameSource::Memory(v) => v.len(),
            FrameSource::Files(v) => v.len(),
        };
        if ground_truth.is_empty() {
            ground_truth = vec![None; n];
        } else if ground_truth.len() != n {
            return Err(Error::GroundTruthMismatch { frames: n, rows: ground_truth.len() });
        }
        for (i, gt) in ground_truth.iter().enumerate() {
            if let Some(b) = gt {
                if b.clip(width as f64, height as f64).is_none() {
                    return Err(Error::data(
                        &name,
                        format!("ground truth of frame {} lies outside the {width}x{height} frame", i + 1),
                    ));
                }
            }
        }
        Ok(Self { name, frames, width, height, ground_truth, attributes })
    }

    pub fn len(&self) -> usize {
        self.ground_truth.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ground_truth.is_empty()
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    /// Frame `index`, 1-based.
    pub fn frame(&self, index: usize) -> Result<Arc<Frame>> {
        if index == 0 || index > self.len() {
            return Err(Error::data(&self.name, format!("frame {index} out of range 1..={}", self.len())));
        }
        match &self.frames {
            FrameSource::Memory(v) => Ok(Arc::clone(&v[index - 1])),
            FrameSource::Files(paths) => {
                let frame = otb::decode_frame(&paths[index - 1], index)?;
                if frame.width != self.width || frame.height != self.height {
                    return Err(Error::data(&paths[index - 1], "frame size differs from the first frame"));
                }
                Ok(Arc::new(frame))
            }
        }
    }

    /// Ground truth of frame `index` (1-based), if annotated.
    pub fn ground_truth_at(&self, index: usize) -> Option<BoundingBox> {
        index.checked_sub(1).and_then(|i| self.ground_truth.get(i).copied().flatten())
    }

    /// Whether the sequence can initialize a tracker.
    pub fn initial_box(&self) -> Result<BoundingBox> {
        self.ground_truth_at(1).ok_or_else(|| Error::MissingInitialGroundTruth(self.name.clone()))
    }

    /// Frames `start..start+len` (1-based, inclusive start) as a new sequence.
    /// Frames are shared, not copied.
    pub fn clip(&self, start: usize, len: usize) -> Result<Sequence> {
        if start == 0 || len == 0 || start + len - 1 > self.len() {
            return Err(Error::data(&self.name, format!("clip {start}+{len} exceeds {} frames", self.len())));
        }
        let range = start - 1..start - 1 + len;
        let frames = match &self.frames {
            FrameSource::Memory(v) => FrameSource::Memory(v[range.clone()].to_vec()),
            FrameSource::Files(v) => FrameSource::Files(v[range.clone()].to_vec()),
        };
        Ok(Sequence {
            name: format!("{}@{}", self.name, start),
            frames,
            width: self.width,
            height: self.height,
            ground_truth: self.ground_truth[range].to_vec(),
            attributes: self.attributes.clone(),
        })
    }
}
