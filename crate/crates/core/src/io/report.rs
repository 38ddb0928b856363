//! `key = value` evaluation reports.

use std::fmt::Write as _;

use crate::io::fmt_full;
use crate::metrics::EvaluationReport;
use crate::peaks::PeakReport;

fn join<T: ToString>(items: &[T]) -> String {
    items.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

pub fn format_peak_report(report: &PeakReport) -> String {
    let offsets: Vec<String> = report
        .offsets
        .iter()
        .map(|o| o.map_or_else(|| "missed".to_string(), |d| d.to_string()))
        .collect();
    let mut out = String::new();
    let _ = writeln!(out, "peaks.window = {}", report.window);
    let _ = writeln!(out, "peaks.total = {}", report.total());
    let _ = writeln!(out, "peaks.identified_exact = {}", report.identified_exact);
    let _ = writeln!(out, "peaks.identified_delayed = {}", report.identified_delayed);
    let _ = writeln!(out, "peaks.missed = {}", report.missed);
    let _ = writeln!(out, "peaks.observed = {}", join(&report.observed));
    let _ = writeln!(out, "peaks.predicted = {}", join(&report.predicted));
    let _ = writeln!(out, "peaks.offsets = {}", offsets.join(","));
    out
}

/// Metrics first, then the peak section when present. `header` lines are
/// emitted verbatim at the top, in order.
pub fn format_report(report: &EvaluationReport, header: &[(&str, String)]) -> String {
    let mut out = String::new();
    for (k, v) in header {
        let _ = writeln!(out, "{k} = {v}");
    }
    let _ = writeln!(out, "n = {}", report.n);
    let _ = writeln!(out, "nmse = {}", fmt_full(report.nmse));
    let _ = writeln!(out, "mse = {}", fmt_full(report.mse));
    let _ = writeln!(out, "correlation = {}", fmt_full(report.correlation));
    if let Some(p) = &report.peak_report {
        out.push_str(&format_peak_report(p));
    }
    out
}
