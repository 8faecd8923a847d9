//! OTB directory layout: `<seq>/img/0001.jpg ...` plus `<seq>/groundtruth_rect.txt`.
//!
//! An optional `<seq>/attributes.txt` lists challenge tags separated by commas
//! or whitespace.

use std::collections::BTreeSet;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::geometry::BoundingBox;
use crate::io::write_atomic;

use super::{Attribute, Frame, FrameSource, Sequence};

const GROUND_TRUTH_FILE: &str = "groundtruth_rect.txt";
const ATTRIBUTES_FILE: &str = "attributes.txt";
const IMAGE_DIR: &str = "img";

/// Parses ground-truth rows. Fields may be separated by commas, tabs or
/// spaces. Rows holding `NaN` or a non-positive size mark unannotated frames.
/// Blank lines are skipped.
pub fn parse_ground_truth(text: &str) -> Result<Vec<Option<BoundingBox>>> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|f| !f.is_empty())
            .collect();
        let bad = || Error::GroundTruthParse { line: lineno + 1, text: line.to_string() };
        if fields.len() != 4 {
            return Err(bad());
        }
        let mut v = [0.0f64; 4];
        for (slot, f) in v.iter_mut().zip(&fields) {
            *slot = f.parse().map_err(|_| bad())?;
        }
        if v.iter().any(|x| x.is_nan()) {
            rows.push(None);
        } else {
            rows.push(BoundingBox::new(v[0], v[1], v[2], v[3]));
        }
    }
    Ok(rows)
}

fn frame_number(path: &Path) -> Option<u64> {
    let ext = path.extension()?.to_str()?.to_ascii_lowercase();
    if !matches!(ext.as_str(), "jpg" | "jpeg" | "png") {
        return None;
    }
    path.file_stem()?.to_str()?.parse().ok()
}

pub(crate) fn decode_frame(path: &Path, index: usize) -> Result<Frame> {
    let img = image::open(path)
        .map_err(|source| Error::Image { path: path.to_path_buf(), source })?
        .into_rgb8();
    let (w, h) = img.dimensions();
    Frame::new(index, w as usize, h as usize, img.into_raw())
}

fn read_attributes(dir: &Path) -> Result<BTreeSet<Attribute>> {
    let path = dir.join(ATTRIBUTES_FILE);
    if !path.exists() {
        return Ok(BTreeSet::new());
    }
    let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
    text.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<Attribute>().map_err(|reason| Error::data(&path, reason)))
        .collect()
}

/// Loads a sequence stored in OTB layout. Frames are decoded lazily; image
/// headers are checked up front so unreadable files fail here.
pub fn load_otb_sequence(dir: &Path) -> Result<Sequence> {
    let img_dir = dir.join(IMAGE_DIR);
    let entries = fs::read_dir(&img_dir).map_err(|e| Error::io(&img_dir, e))?;
    let mut numbered: Vec<(u64, PathBuf)> = Vec::new();
    for entry in entries {
        let path = entry.map_err(|e| Error::io(&img_dir, e))?.path();
        if let Some(n) = frame_number(&path) {
            numbered.push((n, path));
        }
    }
    if numbered.is_empty() {
        return Err(Error::data(&img_dir, "no numbered .jpg/.png frames"));
    }
    numbered.sort();
    let paths: Vec<PathBuf> = numbered.into_iter().map(|(_, p)| p).collect();

    let (width, height) = image::image_dimensions(&paths[0])
        .map_err(|source| Error::Image { path: paths[0].clone(), source })?;
    for p in &paths[1..] {
        let dims = image::image_dimensions(p).map_err(|source| Error::Image { path: p.clone(), source })?;
        if dims != (width, height) {
            return Err(Error::data(p, format!("size {}x{} differs from first frame {width}x{height}", dims.0, dims.1)));
        }
    }

    let gt_path = dir.join(GROUND_TRUTH_FILE);
    let ground_truth = if gt_path.exists() {
        let text = fs::read_to_string(&gt_path).map_err(|e| Error::io(&gt_path, e))?;
        let rows = parse_ground_truth(&text)?;
        if rows.len() != paths.len() {
            return Err(Error::GroundTruthMismatch { frames: paths.len(), rows: rows.len() });
        }
        rows
    } else {
        Vec::new()
    };

    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    let attributes = read_attributes(dir)?;
    let seq = Sequence::assemble(
        name,
        FrameSource::Files(paths),
        width as usize,
        height as usize,
        ground_truth,
        attributes,
    )?;
    if seq.ground_truth.iter().any(Option::is_some) && seq.ground_truth_at(1).is_none() {
        return Err(Error::MissingInitialGroundTruth(seq.name.clone()));
    }
    Ok(seq)
}

fn format_row(b: &Option<BoundingBox>) -> String {
    match b {
        Some(b) => format!("{},{},{},{}", b.x, b.y, b.w, b.h),
        None => "NaN,NaN,NaN,NaN".to_string(),
    }
}

/// Writes `seq` in OTB layout with lossless PNG frames.
pub fn write_otb_sequence(seq: &Sequence, dir: &Path) -> Result<()> {
    let img_dir = dir.join(IMAGE_DIR);
    fs::create_dir_all(&img_dir).map_err(|e| Error::io(&img_dir, e))?;
    for i in 1..=seq.len() {
        let frame = seq.frame(i)?;
        let path = img_dir.join(format!("{i:04}.png"));
        frame.save_png(&path)?;
    }
    if seq.ground_truth.iter().any(Option::is_some) {
        let mut text = String::new();
        for row in &seq.ground_truth {
            text.push_str(&format_row(row));
            text.push('\n');
        }
        write_atomic(&dir.join(GROUND_TRUTH_FILE), text.as_bytes())?;
    }
    if !seq.attributes.is_empty() {
        let tags: Vec<String> = seq.attributes.iter().map(ToString::to_string).collect();
        write_atomic(&dir.join(ATTRIBUTES_FILE), format!("{}\n", tags.join(",")).as_bytes())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn separators() {
        let want = BoundingBox::new(10., 20., 30., 40.);
        assert_eq!(parse_ground_truth("10,20,30,40").unwrap(), vec![want]);
        assert_eq!(parse_ground_truth("10\t20\t30\t40").unwrap(), vec![want]);
        assert_eq!(parse_ground_truth("10 20  30 40\n\n").unwrap(), vec![want]);
        assert_eq!(parse_ground_truth("10, 20, 30, 40").unwrap(), vec![want]);
    }

    #[test]
    fn nan_rows_are_unannotated() {
        let rows = parse_ground_truth("1,2,3,4\nNaN,NaN,NaN,NaN\n0,0,0,0\n").unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows[0].is_some() && rows[1].is_none() && rows[2].is_none());
    }

    #[test]
    fn malformed_line_reports_position() {
        let err = parse_ground_truth("1,2,3,4\n1,2,x,4\n").unwrap_err();
        assert!(matches!(err, Error::GroundTruthParse { line: 2, .. }));
        assert!(parse_ground_truth("1,2,3").is_err());
    }

    fn write_frames(dir: &Path, n: usize, ext: &str) {
        let img = dir.join("img");
        fs::create_dir_all(&img).unwrap();
        for i in 1..=n {
            let buf = vec![(i * 40) as u8; 8 * 6 * 3];
            image::save_buffer(img.join(format!("{i:04}.{ext}")), &buf, 8, 6, image::ExtendedColorType::Rgb8).unwrap();
        }
    }

    #[test]
    fn loads_three_annotated_frames() {
        let tmp = tempfile::tempdir().unwrap();
        let dir = tmp.path().join("Toy");
        write_frames(&dir, 3, "jpg");
        fs::write(dir.join(GROUND_TRUTH_FILE), "1,1,3,3\n2,1,3,3\n3,1,3,3\n").unwrap();
        let seq = load_otb_sequence(&dir).unwrap();
        assert_eq!(seq.name, "Toy");
        assert_eq!(seq.len(), 3);
        assert_eq!(seq.dims(), (8, 6));
        assert_eq!(seq.ground_truth_at(2), BoundingBox::new(2., 1., 3., 3.));
        assert_eq!(seq.frame(3).unwrap().index, 3);
    }

    #[test]
    fn missing_ground_truth_is_allowed() {
        let tmp = tempfile::tempdir().unwrap();
        write_frames(tmp.path(), 2, "png");
        let seq = load_otb_sequence(tmp.path()).unwrap();
        assert!(seq.ground_truth.iter().all(Option::is_none));
        assert!(seq.initial_box().is_err());
    }

    #[test]
    fn count_mismatch() {
        let tmp = tempfile::tempdir().unwrap();
        write_frames(tmp.path(), 3, "png");
        fs::write(tmp.path().join(GROUND_TRUTH_FILE), "1,1,3,3\n2,1,3,3\n").unwrap();
        let err = load_otb_sequence(tmp.path()).unwrap_err();
        assert!(matches!(err, Error::GroundTruthMismatch { frames: 3, rows: 2 }), "{err}");
        assert!(err.to_string().contains('3') && err.to_string().contains('2'));
    }

    #[test]
    fn unreadable_image_names_file() {
        let tmp = tempfile::tempdir().unwrap();
        write_frames(tmp.path(), 2, "png");
        fs::write(tmp.path().join("img/0003.png"), b"not a png").unwrap();
        let err = load_otb_sequence(tmp.path()).unwrap_err();
        assert!(err.to_string().contains("0003.png"), "{err}");
    }

    #[test]
    fn first_frame_must_be_annotated() {
        let tmp = tempfile::tempdir().unwrap();
        write_frames(tmp.path(), 2, "png");
        fs::write(tmp.path().join(GROUND_TRUTH_FILE), "NaN,NaN,NaN,NaN\n1,1,3,3\n").unwrap();
        assert!(matches!(load_otb_sequence(tmp.path()), Err(Error::MissingInitialGroundTruth(_))));
    }

    #[test]
    fn frames_sorted_numerically() {
        let tmp = tempfile::tempdir().unwrap();
        let img = tmp.path().join("img");
        fs::create_dir_all(&img).unwrap();
        for (n, v) in [(10u32, 10u8), (9, 9), (100, 100)] {
            let buf = vec![v; 2 * 2 * 3];
            image::save_buffer(img.join(format!("{n}.png")), &buf, 2, 2, image::ExtendedColorType::Rgb8).unwrap();
        }
        let seq = load_otb_sequence(tmp.path()).unwrap();
        let firsts: Vec<u8> = (1..=3).map(|i| seq.frame(i).unwrap().pixels[0]).collect();
        assert_eq!(firsts, vec![9, 10, 100]);
    }
}
