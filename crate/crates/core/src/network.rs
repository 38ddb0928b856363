//! Memory-based adaptive network: k nearest neighbors, a kernel node per
//! neighbor rank, normalization, and a weighted sum of neighbor targets.
//!
//! Bandwidths are indexed by neighbor rank (the m-th closest sample is fed
//! to the m-th kernel node) and trained by steepest descent on the
//! leave-one-out squared error over the stored samples.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::EmbeddedDataset;

/// Smallest bandwidth steepest descent may reach.
pub const MIN_BANDWIDTH: f64 = 1e-8;

/// Bandwidth every kernel node starts from.
pub const INITIAL_BANDWIDTH: f64 = 1.0;

const MAX_HALVINGS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum KernelKind {
    /// `exp(-d b)`
    Exponential,
    /// `1 / (1 + (d b)^2)`
    InverseQuadratic,
    /// `(max - (d - min)) / max` over the selected neighbor distances.
    LinearRescale,
}

impl KernelKind {
    pub fn is_parametric(self) -> bool {
        !matches!(self, KernelKind::LinearRescale)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            KernelKind::Exponential => "exponential",
            KernelKind::InverseQuadratic => "inverse-quadratic",
            KernelKind::LinearRescale => "linear-rescale",
        }
    }

    /// Derivative of the kernel with respect to its bandwidth.
    fn d_bandwidth(self, d: f64, b: f64) -> f64 {
        match self {
            KernelKind::Exponential => -d * (-d * b).exp(),
            KernelKind::InverseQuadratic => {
                let u = 1.0 + (d * b).powi(2);
                -2.0 * d * d * b / (u * u)
            }
            KernelKind::LinearRescale => 0.0,
        }
    }
}

impl fmt::Display for KernelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" => Ok(KernelKind::Exponential),
            "inverse-quadratic" => Ok(KernelKind::InverseQuadratic),
            "linear-rescale" => Ok(KernelKind::LinearRescale),
            other => Err(Error::invalid("kernel", format!("unknown kernel '{other}'"))),
        }
    }
}

/// Evaluates one kernel node.
///
/// `stats` is `(min, max)` over the selected neighbor distances and is only
/// read by [`KernelKind::LinearRescale`].
pub fn kernel_eval(kind: KernelKind, d: f64, b: f64, stats: (f64, f64)) -> Result<f64> {
    match kind {
        KernelKind::Exponential => Ok((-d * b).exp()),
        KernelKind::InverseQuadratic => Ok(1.0 / (1.0 + (d * b).powi(2))),
        KernelKind::LinearRescale => {
            let (min, max) = stats;
            if max <= 0.0 {
                return Err(Error::DegenerateStats);
            }
            Ok((max - (d - min)) / max)
        }
    }
}

pub(crate) fn row_distances(rows: &[f64], dim: usize, query: &[f64]) -> Vec<f64> {
    rows.chunks_exact(dim)
        .map(|row| {
            row.iter()
                .zip(query)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()
        })
        .collect()
}

/// The k closest samples, nearest first.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborSet {
    pub indices: Vec<usize>,
    pub distances: Vec<f64>,
}

impl NeighborSet {
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Picks the `k` smallest distances, skipping `exclude`.
///
/// Ties go to the lower index. `k` is clamped to the number of eligible
/// samples.
pub fn select_k_min(distances: &[f64], k: usize, exclude: Option<usize>) -> Result<NeighborSet> {
    if k == 0 {
        return Err(Error::invalid("k", "must be >= 1"));
    }
    let mut candidates: Vec<(f64, usize)> = distances
        .iter()
        .enumerate()
        .filter(|&(i, _)| Some(i) != exclude)
        .map(|(i, &d)| (d, i))
        .collect();
    if candidates.is_empty() {
        return Err(Error::NoEligibleSamples);
    }
    let k = k.min(candidates.len());
    let order = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
    if k < candidates.len() {
        candidates.select_nth_unstable_by(k - 1, order);
        candidates.truncate(k);
    }
    candidates.sort_unstable_by(order);
    Ok(NeighborSet {
        indices: candidates.iter().map(|c| c.1).collect(),
        distances: candidates.iter().map(|c| c.0).collect(),
    })
}

/// Layer-one and layer-two activations for one query.
#[derive(Debug, Clone)]
struct Activations {
    raw: Vec<f64>,
    sum: f64,
    uniform: bool,
}

impl Activations {
    fn weight(&self, m: usize) -> f64 {
        if self.uniform {
            1.0 / self.raw.len() as f64
        } else {
            self.raw[m] / self.sum
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptiveNetwork {
    dim: usize,
    inputs: Vec<f64>,
    targets: Vec<f64>,
    k: usize,
    kernel: KernelKind,
    bandwidths: Vec<f64>,
}

impl AdaptiveNetwork {
    /// Stores `targets.len()` samples of width `dim` (row-major `inputs`).
    /// `k` is clamped to the sample count; bandwidths start at
    /// [`INITIAL_BANDWIDTH`].
    pub fn new(
        dim: usize,
        inputs: Vec<f64>,
        targets: Vec<f64>,
        k: usize,
        kernel: KernelKind,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dim", "feature dimension must be >= 1"));
        }
        if k == 0 {
            return Err(Error::invalid("k", "must be >= 1"));
        }
        if targets.is_empty() {
            return Err(Error::TooFewSamples {
                required: 1,
                actual: 0,
            });
        }
        if inputs.len() != dim * targets.len() {
            return Err(Error::DimensionMismatch {
                expected: dim * targets.len(),
                actual: inputs.len(),
            });
        }
        if inputs.iter().chain(&targets).any(|v| !v.is_finite()) {
            return Err(Error::invalid("samples", "non-finite entry"));
        }
        let k = k.min(targets.len());
        Ok(Self {
            dim,
            inputs,
            targets,
            k,
            kernel,
            bandwidths: vec![INITIAL_BANDWIDTH; k],
        })
    }

    pub fn from_dataset(data: &EmbeddedDataset, k: usize, kernel: KernelKind) -> Result<Self> {
        Self::new(
            data.dim(),
            data.flat_inputs().to_vec(),
            data.targets().to_vec(),
            k,
            kernel,
        )
    }

    /// Replaces the bandwidth vector; must hold `k` positive values.
    pub fn with_bandwidths(mut self, bandwidths: Vec<f64>) -> Result<Self> {
        if bandwidths.len() != self.k {
            return Err(Error::LengthMismatch {
                left: bandwidths.len(),
                right: self.k,
            });
        }
        if bandwidths.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
            return Err(Error::invalid("bandwidths", "must be finite and positive"));
        }
        self.bandwidths = bandwidths;
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn kernel(&self) -> KernelKind {
        self.kernel
    }

    pub fn bandwidths(&self) -> &[f64] {
        &self.bandwidths
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }

    pub fn flat_inputs(&self) -> &[f64] {
        &self.inputs
    }

    pub fn input(&self, j: usize) -> &[f64] {
        &self.inputs[j * self.dim..(j + 1) * self.dim]
    }

    /// Euclidean distance from `query` to every stored sample, in storage order.
    pub fn euclidean_distances(&self, query: &[f64]) -> Result<Vec<f64>> {
        if query.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                actual: query.len(),
            });
        }
        Ok(row_distances(&self.inputs, self.dim, query))
    }

    pub fn neighbors(&self, query: &[f64], exclude: Option<usize>) -> Result<NeighborSet> {
        let distances = self.euclidean_distances(query)?;
        select_k_min(&distances, self.k, exclude)
    }

    fn activations(&self, distances: &[f64], bandwidths: &[f64]) -> Activations {
        let stats = (distances[0], distances[distances.len() - 1]);
        let raw: Option<Vec<f64>> = distances
            .iter()
            .zip(bandwidths)
            .map(|(&d, &b)| kernel_eval(self.kernel, d, b, stats).ok())
            .collect();
        match raw {
            Some(raw) => {
                let sum: f64 = raw.iter().sum();
                let uniform = !(sum > 0.0 && sum.is_finite());
                Activations { raw, sum, uniform }
            }
            None => Activations {
                raw: vec![1.0; distances.len()],
                sum: distances.len() as f64,
                uniform: true,
            },
        }
    }

    fn output_for(&self, neighbors: &NeighborSet, bandwidths: &[f64]) -> f64 {
        let act = self.activations(&neighbors.distances, bandwidths);
        neighbors
            .indices
            .iter()
            .enumerate()
            .map(|(m, &i)| act.weight(m) * self.targets[i])
            .sum()
    }

    /// Normalized layer-two weights for a neighbor set, rank order.
    pub fn normalized_weights(&self, neighbors: &NeighborSet) -> Vec<f64> {
        let act = self.activations(&neighbors.distances, &self.bandwidths);
        (0..neighbors.len()).map(|m| act.weight(m)).collect()
    }

    /// Network output for `query`, optionally leaving sample `exclude` out.
    pub fn forward(&self, query: &[f64], exclude: Option<usize>) -> Result<(f64, NeighborSet)> {
        let neighbors = self.neighbors(query, exclude)?;
        let out = self.output_for(&neighbors, &self.bandwidths);
        Ok((out, neighbors))
    }

    pub fn predict(&self, query: &[f64]) -> Result<f64> {
        self.forward(query, None).map(|(out, _)| out)
    }

    /// Neighbor sets of every stored sample with itself left out.
    ///
    /// These do not depend on the bandwidths, so training computes them once.
    pub fn loo_neighbors(&self) -> Result<Vec<NeighborSet>> {
        if self.len() < 2 {
            return Err(Error::TooFewSamples {
                required: 2,
                actual: self.len(),
            });
        }
        (0..self.len())
            .map(|j| self.neighbors(self.input(j), Some(j)))
            .collect()
    }

    /// Leave-one-out prediction for every stored sample.
    pub fn loo_predictions(&self) -> Result<Vec<f64>> {
        let sets = self.loo_neighbors()?;
        Ok(self.loo_outputs(&sets, &self.bandwidths))
    }

    fn loo_outputs(&self, sets: &[NeighborSet], bandwidths: &[f64]) -> Vec<f64> {
        sets.iter().map(|s| self.output_for(s, bandwidths)).collect()
    }

    fn loo_loss_with(&self, sets: &[NeighborSet], bandwidths: &[f64]) -> f64 {
        self.loo_outputs(sets, bandwidths)
            .iter()
            .zip(&self.targets)
            .map(|(p, t)| (p - t).powi(2))
            .sum()
    }

    /// Sum of squared leave-one-out errors.
    pub fn loo_loss(&self) -> Result<f64> {
        let sets = self.loo_neighbors()?;
        Ok(self.loo_loss_with(&sets, &self.bandwidths))
    }

    fn grad_with(&self, sets: &[NeighborSet], bandwidths: &[f64]) -> Vec<f64> {
        let mut grad = vec![0.0; self.k];
        if !self.kernel.is_parametric() {
            return grad;
        }
        for (j, set) in sets.iter().enumerate() {
            let act = self.activations(&set.distances, bandwidths);
            if act.uniform {
                continue;
            }
            let out: f64 = set
                .indices
                .iter()
                .enumerate()
                .map(|(m, &i)| act.weight(m) * self.targets[i])
                .sum();
            let err = out - self.targets[j];
            // d out / d K_m = (r_m - out) / sum
            for (m, (&i, &d)) in set.indices.iter().zip(&set.distances).enumerate() {
                let dk = self.kernel.d_bandwidth(d, bandwidths[m]);
                grad[m] += 2.0 * err * (self.targets[i] - out) * dk / act.sum;
            }
        }
        grad
    }

    /// Analytic gradient of [`loo_loss`](Self::loo_loss) with respect to the
    /// rank bandwidths. Zero for the linear-rescale kernel, which has no
    /// parameter.
    pub fn grad_bandwidths(&self) -> Result<Vec<f64>> {
        if !self.kernel.is_parametric() {
            return Ok(vec![0.0; self.k]);
        }
        let sets = self.loo_neighbors()?;
        Ok(self.grad_with(&sets, &self.bandwidths))
    }

    /// Runs `epochs` steepest-descent steps on the bandwidths.
    ///
    /// A step that raises the loss is retried with half the step size, up to
    /// a fixed number of halvings; the base rate is restored every epoch.
    /// Returns the loss trace, initial loss first.
    pub fn train_bandwidths_sd(&mut self, lr: f64, epochs: usize) -> Vec<f64> {
        let sets = match self.loo_neighbors() {
            Ok(sets) => sets,
            Err(_) => return vec![0.0; epochs + 1],
        };
        let mut loss = self.loo_loss_with(&sets, &self.bandwidths);
        let mut trace = Vec::with_capacity(epochs + 1);
        trace.push(loss);
        for _ in 0..epochs {
            let grad = self.grad_with(&sets, &self.bandwidths);
            if grad.iter().any(|g| *g != 0.0) {
                let mut step = lr;
                for _ in 0..MAX_HALVINGS {
                    let candidate: Vec<f64> = self
                        .bandwidths
                        .iter()
                        .zip(&grad)
                        .map(|(b, g)| (b - step * g).max(MIN_BANDWIDTH))
                        .collect();
                    let trial = self.loo_loss_with(&sets, &candidate);
                    if trial <= loss {
                        self.bandwidths = candidate;
                        loss = trial;
                        break;
                    }
                    step *= 0.5;
                }
            }
            trace.push(loss);
        }
        trace
    }
}
