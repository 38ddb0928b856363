//! Forecasting with a brain-emotional-learning predictor built from
//! memory-based adaptive networks, plus baselines, evaluation and file I/O.
//!
//! The main entry points are [`BelpmModel::train`], the [`Forecaster`]
//! trait shared by every model, and [`experiment::run_experiment`].

pub mod belpm;
pub mod classic;
pub mod error;
pub mod experiment;
pub mod io;
pub mod metrics;
pub mod model;
pub mod network;
pub mod peaks;
pub mod series;
pub mod synthetic;
pub mod wknn;

pub use belpm::{BelpmConfig, BelpmModel, CmWeights, LoWeights};
pub use classic::{ClassicBelModel, OrbitofrontalRule};
pub use error::{Error, ErrorClass, Result};
pub use experiment::{run_experiment, ExperimentConfig};
pub use metrics::{correlation, mse, nmse, EvaluationReport};
pub use model::{Forecaster, Model, ModelKind};
pub use network::{AdaptiveNetwork, KernelKind, NeighborSet};
pub use peaks::{find_peaks, match_peaks, peak_report, PeakReport};
pub use series::{embed, split, EmbeddedDataset, Embedding, TimeSeries};
pub use wknn::WknnModel;
