//! Per-run evaluation reports and their file outputs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::engine::FrameRecord;
use crate::error::{Error, Result};
use crate::geometry::{center_error, iou, BoundingBox};
use crate::io::write_atomic;
use crate::sequence::Attribute;

use super::curves::{auc, precision_curve, success_curve, Curve, PRECISION_AT};
use super::svg::line_chart;

/// Evaluation of one tracked sequence against its ground truth.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceEval {
    pub name: String,
    pub attributes: BTreeSet<Attribute>,
    /// Annotated frames the scores are computed on.
    pub frames: usize,
    pub auc: f64,
    pub precision: f64,
    pub mean_iou: f64,
    pub mean_queried_fraction: f64,
    pub fps: Option<f64>,
    pub success: Curve,
    pub precision_curve: Curve,
}

/// Scores `records` on every annotated frame of `ground_truth`
/// (1-based: entry `i` belongs to frame `i + 1`).
pub fn evaluate_sequence(
    name: &str,
    records: &[FrameRecord],
    ground_truth: &[Option<BoundingBox>],
    attributes: BTreeSet<Attribute>,
    fps: Option<f64>,
) -> Result<SequenceEval> {
    let by_index: BTreeMap<usize, &FrameRecord> = records.iter().map(|r| (r.index, r)).collect();
    let mut ious = Vec::new();
    let mut errors = Vec::new();
    for (i, gt) in ground_truth.iter().enumerate() {
        let Some(gt) = gt else { continue };
        let rec = by_index
            .get(&(i + 1))
            .ok_or_else(|| Error::data(name, format!("no result for annotated frame {}", i + 1)))?;
        ious.push(iou(&rec.estimate, gt));
        errors.push(center_error(&rec.estimate, gt));
    }
    let success = success_curve(&ious)?;
    let precision = precision_curve(&errors)?;
    let queried = if records.is_empty() {
        0.0
    } else {
        records.iter().map(|r| r.queried_fraction).sum::<f64>() / records.len() as f64
    };
    Ok(SequenceEval {
        name: name.to_string(),
        attributes,
        frames: ious.len(),
        auc: auc(&success),
        precision: precision.value_at(PRECISION_AT as f64).unwrap_or(0.0),
        mean_iou: ious.iter().sum::<f64>() / ious.len() as f64,
        mean_queried_fraction: queried,
        fps,
        success,
        precision_curve: precision,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributeRow {
    /// Attribute tag, or `ALL`.
    pub attribute: String,
    pub sequences: usize,
    pub mean_auc: f64,
}

/// Mean AUC over the sequences carrying each tag, plus an `ALL` row.
/// Tags no sequence carries are omitted.
pub fn attribute_table(seqs: &[SequenceEval]) -> Vec<AttributeRow> {
    let mut rows = Vec::new();
    let mut push = |name: String, members: Vec<&SequenceEval>| {
        if !members.is_empty() {
            let mean = members.iter().map(|s| s.auc).sum::<f64>() / members.len() as f64;
            rows.push(AttributeRow { attribute: name, sequences: members.len(), mean_auc: mean });
        }
    };
    push("ALL".into(), seqs.iter().collect());
    for a in Attribute::ALL {
        push(a.to_string(), seqs.iter().filter(|s| s.attributes.contains(&a)).collect());
    }
    rows
}

/// Aggregate of one run (one tracker configuration) over a set of sequences.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub label: String,
    pub auc: f64,
    pub precision: f64,
    pub mean_iou: f64,
    pub mean_queried_fraction: f64,
    /// Frames per second over all sequences with timing.
    pub fps: Option<f64>,
    pub success: Curve,
    pub precision_curve: Curve,
    pub attributes: Vec<AttributeRow>,
    pub sequences: Vec<SequenceEval>,
}

impl EvalReport {
    /// Averages per-sequence curves, giving every sequence equal weight.
    pub fn new(label: impl Into<String>, sequences: Vec<SequenceEval>, fps: Option<f64>) -> Result<Self> {
        if sequences.is_empty() {
            return Err(Error::EmptyInput("no sequences to report"));
        }
        let success = Curve::mean(&sequences.iter().map(|s| s.success.clone()).collect::<Vec<_>>())?;
        let precision_curve = Curve::mean(&sequences.iter().map(|s| s.precision_curve.clone()).collect::<Vec<_>>())?;
        let n = sequences.len() as f64;
        Ok(Self {
            label: label.into(),
            auc: auc(&success),
            precision: precision_curve.value_at(PRECISION_AT as f64).unwrap_or(0.0),
            mean_iou: sequences.iter().map(|s| s.mean_iou).sum::<f64>() / n,
            mean_queried_fraction: sequences.iter().map(|s| s.mean_queried_fraction).sum::<f64>() / n,
            fps,
            success,
            precision_curve,
            attributes: attribute_table(&sequences),
            sequences,
        })
    }
}

fn curves_csv(reports: &[EvalReport], pick: impl Fn(&EvalReport) -> &Curve) -> String {
    let mut out = String::from("threshold");
    for r in reports {
        let _ = write!(out, ",{}", r.label);
    }
    out.push('\n');
    for (i, t) in pick(&reports[0]).thresholds.iter().enumerate() {
        let _ = write!(out, "{t}");
        for r in reports {
            let _ = write!(out, ",{}", pick(r).values[i]);
        }
        out.push('\n');
    }
    out
}

fn attributes_csv(reports: &[EvalReport]) -> String {
    let mut out = String::from("attribute,sequences");
    for r in reports {
        let _ = write!(out, ",{}", r.label);
    }
    out.push('\n');
    for row in &reports[0].attributes {
        let _ = write!(out, "{},{}", row.attribute, row.sequences);
        for r in reports {
            let v = r.attributes.iter().find(|a| a.attribute == row.attribute).map(|a| a.mean_auc);
            let _ = write!(out, ",{}", v.map(|v| v.to_string()).unwrap_or_default());
        }
        out.push('\n');
    }
    out
}

/// Writes `report.json`, `success.csv`/`.svg`, `precision.csv`/`.svg` and
/// `attributes.csv` into `dir`.
pub fn write_reports(dir: &Path, reports: &[EvalReport]) -> Result<()> {
    if reports.is_empty() {
        return Err(Error::EmptyInput("no reports to write"));
    }
    let json = serde_json::to_string_pretty(&serde_json::json!({ "runs": reports }))?;
    write_atomic(&dir.join("report.json"), json.as_bytes())?;
    write_atomic(&dir.join("success.csv"), curves_csv(reports, |r| &r.success).as_bytes())?;
    write_atomic(&dir.join("precision.csv"), curves_csv(reports, |r| &r.precision_curve).as_bytes())?;
    write_atomic(&dir.join("attributes.csv"), attributes_csv(reports).as_bytes())?;

    let legend = |r: &EvalReport, score: f64| format!("{} [{score:.3}]", r.label);
    let success: Vec<(String, &Curve)> = reports.iter().map(|r| (legend(r, r.auc), &r.success)).collect();
    let svg = line_chart("Success plot", "Overlap threshold", "Success rate", &success);
    write_atomic(&dir.join("success.svg"), svg.as_bytes())?;
    let precision: Vec<(String, &Curve)> =
        reports.iter().map(|r| (legend(r, r.precision), &r.precision_curve)).collect();
    let svg = line_chart("Precision plot", "Location error threshold (px)", "Precision", &precision);
    write_atomic(&dir.join("precision.svg"), svg.as_bytes())
}
