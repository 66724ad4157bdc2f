//! Reading and writing nets, summaries, traces and batch reports.

mod native;
mod pnml;
mod report;

use crate::color::ColoredWorkflowNet;
use crate::oracle::Summary;
use crate::rules::ReductionTrace;

pub use native::{emit_native, parse_native, FormatError};
pub use pnml::{import_pnml, ImportError};
pub use report::{emit_report, stats_rows, NetClass, NetOutcome, Report, StatsRow, CSV_HEADER};

/// One `value -> value` line per pair, ordered by the rendered text.
pub fn emit_summary(summary: &Summary) -> String {
    let mut lines: Vec<(String, String)> = summary
        .iter()
        .map(|(v, w)| (v.to_string(), w.to_string()))
        .collect();
    lines.sort();
    lines
        .into_iter()
        .map(|(v, w)| format!("{v} -> {w}\n"))
        .collect()
}

/// The trace listing with node names resolved against `initial`.
pub fn emit_trace(trace: &ReductionTrace, initial: &ColoredWorkflowNet) -> String {
    trace.render(initial)
}
