//! Reading and writing series, models, predictions and reports.

mod csv;
mod model_file;
mod report;

pub use csv::{
    format_predictions_csv, format_series_csv, load_series_csv, parse_predictions_csv, parse_series_csv,
    write_series_csv, GapPolicy, PredictionRow, SeriesFile,
};
pub use model_file::{format_model, load_model, parse_model, save_model, MODEL_HEADER};
pub use report::{format_peak_report, format_report};

/// Scientific notation with 17 significant digits, enough to round-trip any `f64`.
pub(crate) fn fmt_full(x: f64) -> String {
    format!("{x:.16e}")
}
