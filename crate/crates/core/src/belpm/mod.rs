//! Brain-emotional-learning prediction model.
//!
//! Signal path for an input window `i` of width R:
//!
//! * thalamus: `[max(i), min(i)]` plus a pass-through of `i`
//! * sensory cortex: forwards `i` unchanged as the stimulus `s`
//! * basal-lateral amygdala (BL): adaptive network over `[s, max, min]`
//!   producing the primary response `r_a`
//! * medial orbitofrontal (MO): adaptive network over `s` producing the
//!   secondary response `r_o`, trained on the amygdala's expected punishment
//! * centro-medial amygdala (CM): `r = w1 r_a + w2 r_o + w3`
//!
//! Training runs the first learning phase only: steepest descent on each
//! network's bandwidths, then a least-squares fit of the fusion weights.

mod fusion;

pub use fusion::cm_lse_fit;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::Forecaster;
use crate::network::{AdaptiveNetwork, KernelKind};
use crate::series::{EmbeddedDataset, Embedding};

/// Thalamic preprocessing of one input window.
#[derive(Debug, Clone, PartialEq)]
pub struct ThalamusOutput {
    /// Pass-through of the input.
    pub agg: Vec<f64>,
    /// `[max, min]` of the input.
    pub max_min: [f64; 2],
}

pub fn thalamus(input: &[f64]) -> Result<ThalamusOutput> {
    if input.is_empty() {
        return Err(Error::EmptyInput);
    }
    let max = input.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = input.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ThalamusOutput {
        agg: input.to_vec(),
        max_min: [max, min],
    })
}

/// BL feature vector `[s_1, ..., s_R, max, min]`.
pub fn bl_features(stimulus: &[f64], max_min: [f64; 2]) -> Vec<f64> {
    let mut f = Vec::with_capacity(stimulus.len() + 2);
    f.extend_from_slice(stimulus);
    f.extend_from_slice(&max_min);
    f
}

fn bl_features_of(input: &[f64]) -> Result<Vec<f64>> {
    let th = thalamus(input)?;
    Ok(bl_features(&th.agg, th.max_min))
}

/// Centro-medial weights: fusion `(w1, w2, w3)` and punishment `(wa1, wa2, wa3)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CmWeights {
    pub w: [f64; 3],
    pub wa: [f64; 3],
}

impl CmWeights {
    /// Punishment weights are fixed so that `p_a = r_u - r_a`.
    pub const PUNISHMENT: [f64; 3] = [1.0, -1.0, 0.0];

    pub fn fusion(w: [f64; 3]) -> Self {
        Self {
            w,
            wa: Self::PUNISHMENT,
        }
    }

    pub fn fuse(&self, r_a: f64, r_o: f64) -> f64 {
        self.w[0] * r_a + self.w[1] * r_o + self.w[2]
    }

    pub fn punishment(&self, r_u: f64, r_a: f64) -> f64 {
        self.wa[0] * r_u + self.wa[1] * r_a + self.wa[2]
    }
}

/// Lateral orbitofrontal weights; the bias slot additionally carries
/// `-p_a^e` per sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LoWeights {
    pub wo: [f64; 2],
}

impl Default for LoWeights {
    fn default() -> Self {
        Self { wo: [1.0, 0.0] }
    }
}

impl LoWeights {
    pub fn punishment(&self, r_o: f64, expected_punishment: f64) -> f64 {
        self.wo[0] * r_o + self.wo[1] - expected_punishment
    }
}

/// Punishment signals for one training sample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Punishments {
    /// Amygdala punishment `p_a`.
    pub amygdala: f64,
    /// Expected punishment `p_a^e` forwarded to the orbitofrontal path.
    pub expected: f64,
    /// Orbitofrontal punishment `p_o`.
    pub orbitofrontal: f64,
}

pub fn punishments(r_u: f64, r_a: f64, r_o: f64) -> Punishments {
    let cm = CmWeights::fusion([1.0, 0.0, 0.0]);
    let amygdala = cm.punishment(r_u, r_a);
    let expected = amygdala;
    Punishments {
        amygdala,
        expected,
        orbitofrontal: LoWeights::default().punishment(r_o, expected),
    }
}

/// Hyperparameters of the first learning phase.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BelpmConfig {
    pub k_a: usize,
    pub k_o: usize,
    pub kernel_a: KernelKind,
    pub kernel_o: KernelKind,
    pub lr: f64,
    pub epochs: usize,
    pub lambda: f64,
}

impl Default for BelpmConfig {
    fn default() -> Self {
        Self {
            k_a: 8,
            k_o: 8,
            kernel_a: KernelKind::Exponential,
            kernel_o: KernelKind::Exponential,
            lr: 0.05,
            epochs: 50,
            lambda: 1e-8,
        }
    }
}

impl BelpmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.k_a == 0 {
            return Err(Error::invalid("k_a", "must be >= 1"));
        }
        if self.k_o == 0 {
            return Err(Error::invalid("k_o", "must be >= 1"));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(Error::invalid("lr", "must be positive"));
        }
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::invalid("lambda", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BelpmModel {
    embedding: Embedding,
    bl: AdaptiveNetwork,
    mo: AdaptiveNetwork,
    cm: CmWeights,
    lo: LoWeights,
    config: BelpmConfig,
}

/// Intermediate signals recorded while training.
#[derive(Debug, Clone)]
pub struct TrainingTrace {
    pub bl_loss: Vec<f64>,
    pub mo_loss: Vec<f64>,
    /// Leave-one-out BL responses `r_a`.
    pub primary: Vec<f64>,
    /// Leave-one-out MO responses `r_o`.
    pub secondary: Vec<f64>,
    pub punishments: Vec<Punishments>,
}

impl BelpmModel {
    /// Reassembles a model from its parts, checking the structural invariants.
    pub fn from_parts(
        embedding: Embedding,
        bl: AdaptiveNetwork,
        mo: AdaptiveNetwork,
        cm: CmWeights,
        lo: LoWeights,
        config: BelpmConfig,
    ) -> Result<Self> {
        if bl.dim() != embedding.dim + 2 {
            return Err(Error::DimensionMismatch {
                expected: embedding.dim + 2,
                actual: bl.dim(),
            });
        }
        if mo.dim() != embedding.dim {
            return Err(Error::DimensionMismatch {
                expected: embedding.dim,
                actual: mo.dim(),
            });
        }
        if bl.len() != mo.len() {
            return Err(Error::LengthMismatch {
                left: bl.len(),
                right: mo.len(),
            });
        }
        if cm.w.iter().chain(&cm.wa).chain(&lo.wo).any(|w| !w.is_finite()) {
            return Err(Error::invalid("weights", "non-finite fusion weight"));
        }
        Ok(Self {
            embedding,
            bl,
            mo,
            cm,
            lo,
            config,
        })
    }

    pub fn train(data: &EmbeddedDataset, config: BelpmConfig) -> Result<Self> {
        Self::train_traced(data, config).map(|(m, _)| m)
    }

    /// Trains and also returns the per-sample signals of the first phase.
    pub fn train_traced(data: &EmbeddedDataset, config: BelpmConfig) -> Result<(Self, TrainingTrace)> {
        config.validate()?;
        if data.len() < 2 {
            return Err(Error::TooFewSamples {
                required: 2,
                actual: data.len(),
            });
        }
        let dim = data.dim();
        let targets = data.targets().to_vec();

        let mut bl_inputs = Vec::with_capacity(data.len() * (dim + 2));
        for x in data.inputs() {
            bl_inputs.extend(bl_features_of(x)?);
        }
        let mut bl = AdaptiveNetwork::new(dim + 2, bl_inputs, targets.clone(), config.k_a, config.kernel_a)?;
        let bl_loss = bl.train_bandwidths_sd(config.lr, config.epochs);
        let primary = bl.loo_predictions()?;

        let cm = CmWeights::fusion([0.0; 3]);
        let expected: Vec<f64> = targets
            .iter()
            .zip(&primary)
            .map(|(&r_u, &r_a)| cm.punishment(r_u, r_a))
            .collect();

        let stimulus: Vec<f64> = data.inputs().flatten().copied().collect();
        let mut mo = AdaptiveNetwork::new(dim, stimulus, expected, config.k_o, config.kernel_o)?;
        let mo_loss = mo.train_bandwidths_sd(config.lr, config.epochs);
        let secondary = mo.loo_predictions()?;

        let w = cm_lse_fit(&primary, &secondary, &targets, config.lambda)?;
        let punishments = targets
            .iter()
            .zip(&primary)
            .zip(&secondary)
            .map(|((&r_u, &r_a), &r_o)| punishments(r_u, r_a, r_o))
            .collect();

        let model = Self {
            embedding: data.embedding(),
            bl,
            mo,
            cm: CmWeights::fusion(w),
            lo: LoWeights::default(),
            config,
        };
        let trace = TrainingTrace {
            bl_loss,
            mo_loss,
            primary,
            secondary,
            punishments,
        };
        Ok((model, trace))
    }

    pub fn bl(&self) -> &AdaptiveNetwork {
        &self.bl
    }

    pub fn mo(&self) -> &AdaptiveNetwork {
        &self.mo
    }

    pub fn cm(&self) -> CmWeights {
        self.cm
    }

    pub fn lo(&self) -> LoWeights {
        self.lo
    }

    pub fn config(&self) -> BelpmConfig {
        self.config
    }

    /// Overrides the fusion weights.
    pub fn set_fusion(&mut self, w: [f64; 3]) {
        self.cm.w = w;
    }

    /// Primary and secondary responses for one window.
    pub fn responses(&self, input: &[f64]) -> Result<(f64, f64)> {
        if input.len() != self.embedding.dim {
            return Err(Error::DimensionMismatch {
                expected: self.embedding.dim,
                actual: input.len(),
            });
        }
        let r_a = self.bl.predict(&bl_features_of(input)?)?;
        let r_o = self.mo.predict(input)?;
        Ok((r_a, r_o))
    }
}

impl Forecaster for BelpmModel {
    fn embedding(&self) -> Embedding {
        self.embedding
    }

    fn predict(&self, input: &[f64]) -> Result<f64> {
        let (r_a, r_o) = self.responses(input)?;
        Ok(self.cm.fuse(r_a, r_o))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{embed, split, TimeSeries};
    use crate::synthetic::mackey_glass;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn dataset(rows: Vec<Vec<f64>>, targets: Vec<f64>) -> EmbeddedDataset {
        let dim = rows[0].len();
        EmbeddedDataset::from_rows(rows, targets, Embedding::new(dim, 1).unwrap()).unwrap()
    }

    fn mse(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>() / a.len() as f64
    }

    #[test]
    fn thalamus_examples() {
        let th = thalamus(&[3.0, 1.0, 2.0]).unwrap();
        assert_eq!(th.max_min, [3.0, 1.0]);
        assert_eq!(th.agg, vec![3.0, 1.0, 2.0]);
        assert_eq!(thalamus(&[5.0]).unwrap().max_min, [5.0, 5.0]);
        assert_eq!(thalamus(&[-1.0, -4.0]).unwrap().max_min, [-1.0, -4.0]);
        assert!(matches!(thalamus(&[]), Err(Error::EmptyInput)));
    }

    #[test]
    fn bl_feature_layout() {
        assert_eq!(bl_features(&[3.0, 1.0, 2.0], [3.0, 1.0]), vec![3.0, 1.0, 2.0, 3.0, 1.0]);
        assert_eq!(bl_features(&[0.0], [0.0, 0.0]), vec![0.0; 3]);
    }

    #[test]
    fn punishment_examples() {
        let p = punishments(1.0, 0.6, 0.3);
        assert!((p.amygdala - 0.4).abs() < 1e-15);
        assert_eq!(p.expected, p.amygdala);
        assert!((p.orbitofrontal + 0.1).abs() < 1e-15);

        let p = punishments(2.0, 2.0, 0.7);
        assert_eq!(p.amygdala, 0.0);
        assert_eq!(p.orbitofrontal, 0.7);

        let p = punishments(1.5, 0.5, 1.0);
        assert_eq!(p.orbitofrontal, 0.0);
    }

    #[test]
    fn constant_targets_give_zero_error() {
        let rows = (0..12).map(|i| vec![i as f64 * 0.1, (i as f64).sin(), 0.5]).collect();
        let data = dataset(rows, vec![4.0; 12]);
        let (model, trace) = BelpmModel::train_traced(&data, BelpmConfig::default()).unwrap();
        assert!(trace.primary.iter().all(|&r| (r - 4.0).abs() < 1e-12));
        assert!(trace.secondary.iter().all(|&r| r.abs() < 1e-12));
        for q in [[0.0, 0.0, 0.0], [10.0, -3.0, 2.0], [0.35, 0.2, 0.5]] {
            let err = model.predict(&q).unwrap() - 4.0;
            assert!(err * err < 1e-16, "{err}");
        }
    }

    #[test]
    fn two_sample_hand_trace() {
        let data = dataset(vec![vec![0.0, 1.0], vec![1.0, 3.0]], vec![2.0, 5.0]);
        let cfg = BelpmConfig {
            k_a: 1,
            k_o: 1,
            ..BelpmConfig::default()
        };
        let (model, trace) = BelpmModel::train_traced(&data, cfg).unwrap();
        // each sample only sees the other one
        assert_eq!(trace.primary, vec![5.0, 2.0]);
        let residuals: Vec<f64> = trace.punishments.iter().map(|p| p.expected).collect();
        assert_eq!(residuals, vec![-3.0, 3.0]);
        assert_eq!(trace.secondary, vec![3.0, -3.0]);
        assert_eq!(model.mo().targets(), &[-3.0, 3.0]);
        // rows (5, 3, 1) -> 2 and (2, -3, 1) -> 5 admit an exact fit
        for (j, &r_u) in data.targets().iter().enumerate() {
            let fit = model.cm().fuse(trace.primary[j], trace.secondary[j]);
            assert!((fit - r_u).abs() < 1e-6);
        }
        assert_eq!(model.bl().dim(), 4);
        assert_eq!(model.mo().dim(), 2);
    }

    #[test]
    fn fusion_identity_equals_bl() {
        let s = mackey_glass(150, 17, 1.2, 50).unwrap();
        let data = embed(&s, Embedding::new(3, 1).unwrap()).unwrap();
        let mut model = BelpmModel::train(&data, BelpmConfig { epochs: 5, ..Default::default() }).unwrap();
        model.set_fusion([1.0, 0.0, 0.0]);
        for x in data.inputs().take(20) {
            let th = thalamus(x).unwrap();
            let direct = model.bl().predict(&bl_features(x, th.max_min)).unwrap();
            assert_eq!(model.predict(x).unwrap(), direct);
        }
    }

    #[test]
    fn exact_recall_with_single_neighbor() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let rows: Vec<Vec<f64>> = (0..30)
            .map(|_| (0..3).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let targets: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let data = dataset(rows, targets.clone());
        let cfg = BelpmConfig {
            k_a: 1,
            k_o: 1,
            epochs: 3,
            ..Default::default()
        };
        let mut model = BelpmModel::train(&data, cfg).unwrap();
        model.set_fusion([1.0, 0.0, 0.0]);
        for (j, x) in data.inputs().enumerate() {
            assert_eq!(model.predict(x).unwrap(), targets[j]);
        }
    }

    #[test]
    fn punishment_identity_and_cm_optimality() {
        let s = mackey_glass(260, 17, 1.2, 100).unwrap();
        let data = embed(&s, Embedding::new(3, 1).unwrap()).unwrap();
        let cfg = BelpmConfig {
            epochs: 10,
            lambda: 0.0,
            ..Default::default()
        };
        let (model, trace) = BelpmModel::train_traced(&data, cfg).unwrap();
        for ((p, &r_a), &r_u) in trace.punishments.iter().zip(&trace.primary).zip(data.targets()) {
            assert!((p.amygdala + r_a - r_u).abs() <= f64::EPSILON * r_u.abs().max(r_a.abs()));
        }

        let targets = data.targets();
        let fused: Vec<f64> = trace
            .primary
            .iter()
            .zip(&trace.secondary)
            .map(|(&a, &o)| model.cm().fuse(a, o))
            .collect();
        let mean = targets.iter().sum::<f64>() / targets.len() as f64;
        let cm_mse = mse(&fused, targets);
        assert!(cm_mse <= mse(&trace.primary, targets) + 1e-15);
        assert!(cm_mse <= mse(&trace.secondary, targets) + 1e-15);
        assert!(cm_mse <= mse(&vec![mean; targets.len()], targets) + 1e-15);
    }

    #[test]
    fn training_is_deterministic() {
        let s = mackey_glass(200, 17, 1.2, 100).unwrap();
        let data = embed(&s, Embedding::new(3, 1).unwrap()).unwrap();
        let cfg = BelpmConfig { epochs: 5, ..Default::default() };
        assert_eq!(BelpmModel::train(&data, cfg).unwrap(), BelpmModel::train(&data, cfg).unwrap());
    }

    #[test]
    fn predict_series_shapes() {
        let s = mackey_glass(300, 17, 1.2, 100).unwrap();
        let data = embed(&s, Embedding::new(3, 2).unwrap()).unwrap();
        let (train, _) = split(&data, 200).unwrap();
        let model = BelpmModel::train(&train, BelpmConfig { epochs: 3, ..Default::default() }).unwrap();

        let window = TimeSeries::with_time(s.values()[..5].to_vec(), 0, 1).unwrap();
        let out = model.predict_series(&window).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(out.start_time(), 4);

        let out = model.predict_series(&s).unwrap();
        assert_eq!(out.len(), s.len() - 3 - 2 + 1);
        for (j, x) in data.inputs().enumerate() {
            assert_eq!(out.values()[j], model.predict(x).unwrap());
        }

        let short = TimeSeries::new(vec![1.0; 4]).unwrap();
        assert!(matches!(model.predict_series(&short), Err(Error::SeriesTooShort { .. })));
    }

    #[test]
    fn predict_checks_dimension() {
        let data = dataset(vec![vec![0.0, 1.0], vec![1.0, 3.0], vec![2.0, 0.0]], vec![2.0, 5.0, 1.0]);
        let model = BelpmModel::train(&data, BelpmConfig::default()).unwrap();
        assert!(matches!(
            model.predict(&[1.0]),
            Err(Error::DimensionMismatch { expected: 2, actual: 1 })
        ));
    }

    #[test]
    fn train_needs_two_samples() {
        let data = dataset(vec![vec![0.0]], vec![1.0]);
        assert!(matches!(
            BelpmModel::train(&data, BelpmConfig::default()),
            Err(Error::TooFewSamples { .. })
        ));
    }
}
