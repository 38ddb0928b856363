//! Forecast error metrics.

use crate::error::{Error, Result};
use crate::peaks::PeakReport;

fn check_pair(y: &[f64], yhat: &[f64], min_len: usize) -> Result<()> {
    if y.len() != yhat.len() {
        return Err(Error::LengthMismatch {
            left: y.len(),
            right: yhat.len(),
        });
    }
    if y.len() < min_len {
        return Err(Error::TooFewSamples {
            required: min_len,
            actual: y.len(),
        });
    }
    if y.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("observations"));
    }
    if yhat.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("predictions"));
    }
    Ok(())
}

fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

fn sse(y: &[f64], yhat: &[f64]) -> f64 {
    y.iter().zip(yhat).map(|(a, b)| (a - b) * (a - b)).sum()
}

/// Squared-error sum over the centered sum of squares of `y`.
pub fn nmse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat, 1)?;
    let m = mean(y);
    let den: f64 = y.iter().map(|v| (v - m) * (v - m)).sum();
    if den == 0.0 {
        return Err(Error::ZeroVariance("observations"));
    }
    Ok(sse(y, yhat) / den)
}

pub fn mse(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat, 1)?;
    Ok(sse(y, yhat) / y.len() as f64)
}

/// Pearson correlation with population moments.
pub fn correlation(y: &[f64], yhat: &[f64]) -> Result<f64> {
    check_pair(y, yhat, 2)?;
    let (my, mp) = (mean(y), mean(yhat));
    let n = y.len() as f64;
    let (mut cov, mut vy, mut vp) = (0.0, 0.0, 0.0);
    for (a, b) in y.iter().zip(yhat) {
        let (da, db) = (a - my, b - mp);
        cov += da * db;
        vy += da * da;
        vp += db * db;
    }
    if vy == 0.0 {
        return Err(Error::ZeroVariance("observations"));
    }
    if vp == 0.0 {
        return Err(Error::ZeroVariance("predictions"));
    }
    let rho = (cov / n) / ((vy / n).sqrt() * (vp / n).sqrt());
    Ok(rho.clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationReport {
    pub nmse: f64,
    pub mse: f64,
    pub correlation: f64,
    pub n: usize,
    pub peak_report: Option<PeakReport>,
}

impl EvaluationReport {
    pub fn compute(y: &[f64], yhat: &[f64]) -> Result<Self> {
        Ok(Self {
            nmse: nmse(y, yhat)?,
            mse: mse(y, yhat)?,
            correlation: correlation(y, yhat)?,
            n: y.len(),
            peak_report: None,
        })
    }
}
