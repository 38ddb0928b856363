//! Classic amygdala-orbitofrontal learner: one linear amygdala node and one
//! linear orbitofrontal node per stimulus component, output
//! `E = sum A - sum O`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::series::{EmbeddedDataset, Embedding};

/// Error term driving the orbitofrontal weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrbitofrontalRule {
    /// `dW_i = beta s_i (sum O - REW)`
    #[default]
    Reinforcement,
    /// `dW_i = beta s_i (E - REW)`, the model-output variant used by the
    /// original amygdala-orbitofrontal simulations.
    OutputError,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassicBelModel {
    embedding: Embedding,
    pub v: Vec<f64>,
    pub w: Vec<f64>,
    pub alpha: f64,
    pub beta: f64,
    pub rule: OrbitofrontalRule,
}

/// Node activations for one stimulus.
#[derive(Debug, Clone, PartialEq)]
pub struct BelResponse {
    pub e: f64,
    pub a: Vec<f64>,
    pub o: Vec<f64>,
}

/// Weight increments applied by one update.
#[derive(Debug, Clone, PartialEq)]
pub struct BelDelta {
    pub dv: Vec<f64>,
    pub dw: Vec<f64>,
}

impl ClassicBelModel {
    /// Zero-initialized weights for stimuli of width `embedding.dim`.
    pub fn new(embedding: Embedding, alpha: f64, beta: f64) -> Result<Self> {
        let dim = embedding.dim;
        Self::from_weights(embedding, vec![0.0; dim], vec![0.0; dim], alpha, beta)
    }

    pub fn from_weights(
        embedding: Embedding,
        v: Vec<f64>,
        w: Vec<f64>,
        alpha: f64,
        beta: f64,
    ) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::invalid("alpha", format!("must lie in (0, 1], got {alpha}")));
        }
        if !(beta > 0.0 && beta <= 1.0) {
            return Err(Error::invalid("beta", format!("must lie in (0, 1], got {beta}")));
        }
        for weights in [&v, &w] {
            if weights.len() != embedding.dim {
                return Err(Error::DimensionMismatch {
                    expected: embedding.dim,
                    actual: weights.len(),
                });
            }
        }
        Ok(Self {
            embedding,
            v,
            w,
            alpha,
            beta,
            rule: OrbitofrontalRule::default(),
        })
    }

    pub fn with_rule(mut self, rule: OrbitofrontalRule) -> Self {
        self.rule = rule;
        self
    }

    fn check(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.v.len() {
            return Err(Error::DimensionMismatch {
                expected: self.v.len(),
                actual: s.len(),
            });
        }
        Ok(())
    }

    pub fn forward(&self, s: &[f64]) -> Result<BelResponse> {
        self.check(s)?;
        let a: Vec<f64> = self.v.iter().zip(s).map(|(v, s)| v * s).collect();
        let o: Vec<f64> = self.w.iter().zip(s).map(|(w, s)| w * s).collect();
        let e = a.iter().sum::<f64>() - o.iter().sum::<f64>();
        Ok(BelResponse { e, a, o })
    }

    /// One associative update towards reinforcement `rew`; both increments
    /// use the activations from before the update.
    pub fn update(&mut self, s: &[f64], rew: f64) -> Result<BelDelta> {
        let resp = self.forward(s)?;
        let sum_a: f64 = resp.a.iter().sum();
        let sum_o: f64 = resp.o.iter().sum();
        let amygdala_err = (rew - sum_a).max(0.0);
        let orbito_err = match self.rule {
            OrbitofrontalRule::Reinforcement => sum_o - rew,
            OrbitofrontalRule::OutputError => resp.e - rew,
        };
        let dv: Vec<f64> = s.iter().map(|si| self.alpha * (si * amygdala_err)).collect();
        let dw: Vec<f64> = s.iter().map(|si| self.beta * (si * orbito_err)).collect();
        for (v, d) in self.v.iter_mut().zip(&dv) {
            *v += d;
        }
        for (w, d) in self.w.iter_mut().zip(&dw) {
            *w += d;
        }
        Ok(BelDelta { dv, dw })
    }

    /// Sequential updates over every (window, target) pair, `epochs` times,
    /// with the target as the reinforcement.
    pub fn train(&mut self, data: &EmbeddedDataset, epochs: usize) -> Result<()> {
        if data.is_empty() {
            return Err(Error::TooFewSamples {
                required: 1,
                actual: 0,
            });
        }
        for _ in 0..epochs {
            for (s, &rew) in data.inputs().zip(data.targets()) {
                self.update(s, rew)?;
            }
        }
        Ok(())
    }
}

impl Forecaster for ClassicBelModel {
    fn embedding(&self) -> Embedding {
        self.embedding
    }

    fn predict(&self, input: &[f64]) -> Result<f64> {
        self.forward(input).map(|r| r.e)
    }
}
