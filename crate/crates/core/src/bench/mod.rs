//! Benchmark metrics: success and precision curves, their summary scores,
//! per-attribute tables and report files.

mod curves;
mod report;
mod svg;

pub use curves::{auc, measure_fps, precision_curve, success_curve, Curve, PRECISION_AT, PRECISION_MAX_PX, SUCCESS_POINTS};
pub use report::{attribute_table, evaluate_sequence, write_reports, AttributeRow, EvalReport, SequenceEval};
pub use svg::line_chart;
