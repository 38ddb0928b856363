//! Peak detection and matching of observed peaks against forecast peaks.

use crate::error::{Error, Result};

/// Default tolerance, in samples, for a delayed or advanced peak.
pub const DEFAULT_WINDOW: usize = 2;

/// Indices of strict local maxima, ascending.
///
/// A peak needs a strict rise into it and a strict fall after it; a flat
/// top is reported at its first index. Endpoints are never peaks. With
/// `top_m`, only the `m` highest peaks are kept (earlier index wins ties).
pub fn find_peaks(values: &[f64], top_m: Option<usize>) -> Result<Vec<usize>> {
    let n = values.len();
    if n < 3 {
        return Err(Error::SeriesTooShort {
            required: 3,
            actual: n,
        });
    }
    let mut peaks = Vec::new();
    let mut i = 1;
    while i + 1 < n {
        if values[i - 1] < values[i] {
            let mut end = i;
            while end + 1 < n && values[end + 1] == values[i] {
                end += 1;
            }
            if end + 1 < n && values[end + 1] < values[i] {
                peaks.push(i);
            }
            i = end + 1;
        } else {
            i += 1;
        }
    }
    if let Some(m) = top_m {
        if m < peaks.len() {
            peaks.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
            peaks.truncate(m);
            peaks.sort_unstable();
        }
    }
    Ok(peaks)
}

/// Outcome of matching observed peaks against forecast peaks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PeakReport {
    pub identified_exact: usize,
    pub identified_delayed: usize,
    pub missed: usize,
    pub window: usize,
    pub observed: Vec<usize>,
    pub predicted: Vec<usize>,
    /// `predicted - observed` for each observed peak, `None` when missed.
    pub offsets: Vec<Option<i64>>,
}

impl PeakReport {
    pub fn total(&self) -> usize {
        self.observed.len()
    }
}

/// Matches each observed peak to a distinct forecast peak at most `window`
/// samples away.
///
/// Forecast peaks are the `top_m` highest local maxima of `predicted`.
/// Pairs are assigned greedily, smallest offset first, ties going to the
/// earlier forecast peak and then the earlier observed peak.
pub fn match_peaks(observed_peaks: &[usize], predicted: &[f64], window: usize, top_m: usize) -> Result<PeakReport> {
    if top_m == 0 {
        return Err(Error::invalid("top_m", "must be >= 1"));
    }
    if let Some(&last) = observed_peaks.iter().max() {
        if last >= predicted.len() {
            return Err(Error::LengthMismatch {
                left: last + 1,
                right: predicted.len(),
            });
        }
    }
    let forecast = find_peaks(predicted, Some(top_m))?;

    let mut pairs: Vec<(usize, usize, usize)> = Vec::new();
    for (oi, &o) in observed_peaks.iter().enumerate() {
        for (pi, &p) in forecast.iter().enumerate() {
            let gap = o.abs_diff(p);
            if gap <= window {
                pairs.push((gap, pi, oi));
            }
        }
    }
    pairs.sort_unstable();

    let mut offsets = vec![None; observed_peaks.len()];
    let mut taken = vec![false; forecast.len()];
    for (_, pi, oi) in pairs {
        if taken[pi] || offsets[oi].is_some() {
            continue;
        }
        taken[pi] = true;
        offsets[oi] = Some(forecast[pi] as i64 - observed_peaks[oi] as i64);
    }

    let exact = offsets.iter().filter(|o| **o == Some(0)).count();
    let delayed = offsets.iter().filter(|o| matches!(o, Some(d) if *d != 0)).count();
    Ok(PeakReport {
        identified_exact: exact,
        identified_delayed: delayed,
        missed: observed_peaks.len() - exact - delayed,
        window,
        observed: observed_peaks.to_vec(),
        predicted: forecast,
        offsets,
    })
}

/// Detects peaks in `observed` and matches them against `predicted`.
///
/// Without `top_m`, every observed peak is kept and the forecast is
/// truncated to the same count.
pub fn peak_report(observed: &[f64], predicted: &[f64], window: usize, top_m: Option<usize>) -> Result<PeakReport> {
    if observed.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: observed.len(),
            right: predicted.len(),
        });
    }
    let peaks = find_peaks(observed, top_m)?;
    let m = top_m.unwrap_or(peaks.len()).max(1);
    match_peaks(&peaks, predicted, window, m)
}
