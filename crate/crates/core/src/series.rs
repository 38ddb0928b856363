//! Time series, time-delay embedding and chronological splitting.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A uniformly sampled scalar series.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
    start_time: i64,
    step: i64,
}

impl TimeSeries {
    /// Builds a series starting at time 0 with unit step.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        Self::with_time(values, 0, 1)
    }

    pub fn with_time(values: Vec<f64>, start_time: i64, step: i64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptyInput);
        }
        if step <= 0 {
            return Err(Error::invalid("step", format!("must be positive, got {step}")));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::invalid(
                "values",
                format!("non-finite value at position {pos}"),
            ));
        }
        Ok(Self {
            values,
            start_time,
            step,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn start_time(&self) -> i64 {
        self.start_time
    }

    pub fn step(&self) -> i64 {
        self.step
    }

    /// Timestamp of the sample at `index`.
    pub fn time_at(&self, index: usize) -> i64 {
        self.start_time + self.step * index as i64
    }

    /// Sub-series covering `range` with timestamps preserved.
    pub fn slice(&self, range: std::ops::Range<usize>) -> Result<Self> {
        if range.end > self.len() || range.start >= range.end {
            return Err(Error::IndexOutOfRange {
                index: range.end,
                len: self.len(),
            });
        }
        Ok(Self {
            values: self.values[range.clone()].to_vec(),
            start_time: self.time_at(range.start),
            step: self.step,
        })
    }
}

/// Embedding dimension and forecast horizon.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub dim: usize,
    pub horizon: usize,
}

impl Embedding {
    pub fn new(dim: usize, horizon: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "embedding dimension must be >= 1"));
        }
        if horizon == 0 {
            return Err(Error::invalid("horizon", "horizon must be >= 1"));
        }
        Ok(Self { dim, horizon })
    }

    /// Number of (window, target) pairs a series of length `len` yields.
    pub fn pair_count(&self, len: usize) -> usize {
        (len + 1).saturating_sub(self.dim + self.horizon)
    }
}

impl Default for Embedding {
    fn default() -> Self {
        Self { dim: 3, horizon: 1 }
    }
}

/// Input windows paired with their targets, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddedDataset {
    embedding: Embedding,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    times: Vec<i64>,
}

impl EmbeddedDataset {
    /// Assembles a dataset from explicit rows. Target times default to the row index.
    pub fn from_rows(rows: Vec<Vec<f64>>, targets: Vec<f64>, embedding: Embedding) -> Result<Self> {
        if rows.len() != targets.len() {
            return Err(Error::LengthMismatch {
                left: rows.len(),
                right: targets.len(),
            });
        }
        let mut inputs = Vec::with_capacity(rows.len() * embedding.dim);
        for row in &rows {
            if row.len() != embedding.dim {
                return Err(Error::DimensionMismatch {
                    expected: embedding.dim,
                    actual: row.len(),
                });
            }
            inputs.extend_from_slice(row);
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("dataset", "non-finite entry"));
        }
        let times = (0..targets.len() as i64).collect();
        Ok(Self {
            embedding,
            inputs,
            targets,
            times,
        })
    }

    pub fn embedding(&self) -> Embedding {
        self.embedding
    }

    pub fn dim(&self) -> usize {
        self.embedding.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn input(&self, j: usize) -> &[f64] {
        let d = self.embedding.dim;
        &self.inputs[j * d..(j + 1) * d]
    }

    pub fn inputs(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.inputs.chunks_exact(self.embedding.dim)
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    /// Timestamp of each target sample.
    pub fn times(&self) -> &[i64] {
        &self.times
    }

    pub(crate) fn flat_inputs(&self) -> &[f64] {
        &self.inputs
    }
}

/// Unrolls `series` into windows `[x_{t-R+1}, ..., x_t]` with target `x_{t+h}`.
pub fn embed(series: &TimeSeries, embedding: Embedding) -> Result<EmbeddedDataset> {
    let Embedding { dim, horizon } = embedding;
    let required = dim + horizon;
    let values = series.values();
    if values.len() < required {
        return Err(Error::SeriesTooShort {
            required,
            actual: values.len(),
        });
    }
    let count = embedding.pair_count(values.len());
    let mut inputs = Vec::with_capacity(count * dim);
    let mut targets = Vec::with_capacity(count);
    let mut times = Vec::with_capacity(count);
    for j in 0..count {
        inputs.extend_from_slice(&values[j..j + dim]);
        let t = j + dim - 1 + horizon;
        targets.push(values[t]);
        times.push(series.time_at(t));
    }
    Ok(EmbeddedDataset {
        embedding,
        inputs,
        targets,
        times,
    })
}

/// Chronological split: the first `n_train` pairs and the remainder.
pub fn split(dataset: &EmbeddedDataset, n_train: usize) -> Result<(EmbeddedDataset, EmbeddedDataset)> {
    if n_train > dataset.len() {
        return Err(Error::IndexOutOfRange {
            index: n_train,
            len: dataset.len(),
        });
    }
    let cut = n_train * dataset.dim();
    let part = |inputs: &[f64], targets: &[f64], times: &[i64]| EmbeddedDataset {
        embedding: dataset.embedding,
        inputs: inputs.to_vec(),
        targets: targets.to_vec(),
        times: times.to_vec(),
    };
    Ok((
        part(
            &dataset.inputs[..cut],
            &dataset.targets[..n_train],
            &dataset.times[..n_train],
        ),
        part(
            &dataset.inputs[cut..],
            &dataset.targets[n_train..],
            &dataset.times[n_train..],
        ),
    ))
}
