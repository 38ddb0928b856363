//! Inverse-distance weighted k-nearest-neighbor regression.

use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::network::{row_distances, select_k_min};
use crate::series::{EmbeddedDataset, Embedding};

/// Guard added to every distance so exact matches get a finite, dominant weight.
pub const DISTANCE_EPSILON: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct WknnModel {
    embedding: Embedding,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    k: usize,
}

impl WknnModel {
    pub fn fit(data: &EmbeddedDataset, k: usize) -> Result<Self> {
        Self::from_parts(
            data.embedding(),
            data.flat_inputs().to_vec(),
            data.targets().to_vec(),
            k,
        )
    }

    pub fn from_parts(embedding: Embedding, inputs: Vec<f64>, targets: Vec<f64>, k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        if targets.is_empty() {
            return Err(Error::TooFewSamples {
                required: 1,
                actual: 0,
            });
        }
        if inputs.len() != targets.len() * embedding.dim {
            return Err(Error::DimensionMismatch {
                expected: targets.len() * embedding.dim,
                actual: inputs.len(),
            });
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "non-finite entry"));
        }
        let k = k.min(targets.len());
        Ok(Self {
            embedding,
            inputs,
            targets,
            k,
        })
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn flat_inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

impl Forecaster for WknnModel {
    fn embedding(&self) -> Embedding {
        self.embedding
    }

    fn predict(&self, query: &[f64]) -> Result<f64> {
        if query.len() != self.embedding.dim {
            return Err(Error::DimensionMismatch {
                expected: self.embedding.dim,
                actual: query.len(),
            });
        }
        let distances = row_distances(&self.inputs, self.embedding.dim, query);
        let set = select_k_min(&distances, self.k, None)?;
        let weights: Vec<f64> = set.distances.iter().map(|d| 1.0 / (d + DISTANCE_EPSILON)).collect();
        let total: f64 = weights.iter().sum();
        Ok(set
            .indices
            .iter()
            .zip(&weights)
            .map(|(&i, w)| w / total * self.targets[i])
            .sum())
    }
}
