//! End-to-end experiment runs described by a TOML configuration.
//!
//! ```toml
//! [data]
//! source = "mackey-glass"
//! n = 600
//!
//! [embedding]
//! dim = 3
//! horizon = 1
//!
//! [split]
//! n_train = 500
//!
//! [model]
//! kind = "belpm"
//! k_a = 8
//! k_o = 8
//!
//! [evaluation]
//! peak_window = 2
//!
//! [output]
//! dir = "runs/mg"
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::belpm::{BelpmConfig, BelpmModel};
use crate::classic::{ClassicBelModel, OrbitofrontalRule};
use crate::error::{Error, Result};
use crate::io::{self, GapPolicy, PredictionRow, SeriesFile};
use crate::metrics::EvaluationReport;
use crate::model::{Forecaster, Model};
use crate::peaks::{peak_report, DEFAULT_WINDOW};
use crate::series::{embed, split, EmbeddedDataset, Embedding, TimeSeries};
use crate::synthetic;
use crate::wknn::WknnModel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "source", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DataConfig {
    File {
        path: PathBuf,
        #[serde(default)]
        missing_sentinel: Option<f64>,
        #[serde(default)]
        gap_policy: GapPolicy,
    },
    MackeyGlass {
        n: usize,
        #[serde(default = "defaults::tau")]
        tau: usize,
        #[serde(default = "defaults::mg_x0")]
        x0: f64,
        #[serde(default = "defaults::warmup")]
        warmup: usize,
    },
    Logistic {
        n: usize,
        #[serde(default = "defaults::r")]
        r: f64,
        #[serde(default = "defaults::logistic_x0")]
        x0: f64,
    },
}

mod defaults {
    pub fn tau() -> usize {
        17
    }
    pub fn mg_x0() -> f64 {
        1.2
    }
    pub fn warmup() -> usize {
        100
    }
    pub fn r() -> f64 {
        3.9
    }
    pub fn logistic_x0() -> f64 {
        0.3
    }
    pub fn wknn_k() -> usize {
        2
    }
    pub fn rate() -> f64 {
        0.1
    }
    pub fn bel_epochs() -> usize {
        1
    }
    pub fn window() -> usize {
        super::DEFAULT_WINDOW
    }
    pub fn yes() -> bool {
        true
    }
}

/// Which embedded pairs train the model and which are forecast.
///
/// The first `n_train` pairs train; after skipping `skip` further pairs,
/// the next `n_test` pairs (all remaining when absent) are forecast.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    pub n_train: usize,
    #[serde(default)]
    pub skip: usize,
    #[serde(default)]
    pub n_test: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ModelConfig {
    Belpm(BelpmConfig),
    Wknn {
        #[serde(default = "defaults::wknn_k")]
        k: usize,
    },
    ClassicBel {
        #[serde(default = "defaults::rate")]
        alpha: f64,
        #[serde(default = "defaults::rate")]
        beta: f64,
        #[serde(default = "defaults::bel_epochs")]
        epochs: usize,
        #[serde(default)]
        rule: OrbitofrontalRule,
    },
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig::Belpm(BelpmConfig::default())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvaluationConfig {
    #[serde(default = "defaults::window")]
    pub peak_window: usize,
    /// Observed peaks to keep; all when absent.
    #[serde(default)]
    pub top_m: Option<usize>,
    #[serde(default = "defaults::yes")]
    pub peaks: bool,
}

impl Default for EvaluationConfig {
    fn default() -> Self {
        Self {
            peak_window: DEFAULT_WINDOW,
            top_m: None,
            peaks: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Directory for `predictions.csv`, `report.txt`, `peaks.txt` and
    /// `model.txt`; nothing is written when absent.
    #[serde(default)]
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub data: DataConfig,
    #[serde(default)]
    pub embedding: Embedding,
    pub split: SplitConfig,
    #[serde(default)]
    pub model: ModelConfig,
    #[serde(default)]
    pub evaluation: EvaluationConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads a config file; relative data and output paths are taken
    /// relative to the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        if let DataConfig::File { path, .. } = &mut config.data {
            if path.is_relative() {
                *path = base.join(&*path);
            }
        }
        if let Some(dir) = &mut config.output.dir {
            if dir.is_relative() {
                *dir = base.join(&*dir);
            }
        }
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        Embedding::new(self.embedding.dim, self.embedding.horizon)?;
        match &self.model {
            ModelConfig::Belpm(config) => config.validate()?,
            ModelConfig::Wknn { k } if *k == 0 => return Err(Error::invalid("k", "must be >= 1")),
            ModelConfig::ClassicBel { alpha, beta, .. } => {
                ClassicBelModel::new(self.embedding, *alpha, *beta)?;
            }
            ModelConfig::Wknn { .. } => {}
        }
        if self.split.n_train == 0 {
            return Err(Error::Config("split.n_train must be >= 1".into()));
        }
        if self.evaluation.top_m == Some(0) {
            return Err(Error::Config("evaluation.top_m must be >= 1".into()));
        }
        Ok(())
    }
}

pub fn load_data(config: &DataConfig) -> Result<TimeSeries> {
    match config {
        DataConfig::File {
            path,
            missing_sentinel,
            gap_policy,
        } => {
            if !path.is_file() {
                return Err(Error::Config(format!("data file not found: {}", path.display())));
            }
            io::load_series_csv(&SeriesFile {
                path: path.clone(),
                missing_sentinel: *missing_sentinel,
                gap_policy: *gap_policy,
            })
        }
        DataConfig::MackeyGlass { n, tau, x0, warmup } => {
            synthetic::mackey_glass(*n, *tau, *x0, *warmup)
        }
        DataConfig::Logistic { n, r, x0 } => synthetic::logistic(*n, *r, *x0),
    }
}

pub fn train_model(config: &ModelConfig, data: &EmbeddedDataset) -> Result<Model> {
    Ok(match config {
        ModelConfig::Belpm(config) => Model::Belpm(BelpmModel::train(data, *config)?),
        ModelConfig::Wknn { k } => Model::Wknn(WknnModel::fit(data, *k)?),
        ModelConfig::ClassicBel {
            alpha,
            beta,
            epochs,
            rule,
        } => {
            let mut m = ClassicBelModel::new(data.embedding(), *alpha, *beta)?.with_rule(*rule);
            m.train(data, *epochs)?;
            Model::ClassicBel(m)
        }
    })
}

/// Cuts an embedded dataset into training and test parts per `split`.
pub fn split_dataset(data: &EmbeddedDataset, config: &SplitConfig) -> Result<(EmbeddedDataset, EmbeddedDataset)> {
    let n = data.len();
    let test_start = config.n_train + config.skip;
    if test_start >= n {
        return Err(Error::Config(format!(
            "split leaves no test pairs: n_train {} + skip {} >= {n} embedded pairs",
            config.n_train, config.skip
        )));
    }
    let (train, rest) = split(data, config.n_train)?;
    let (_, rest) = split(&rest, config.skip)?;
    match config.n_test {
        Some(m) if m > rest.len() => Err(Error::Config(format!(
            "split.n_test {m} exceeds the {} pairs available",
            rest.len()
        ))),
        Some(0) => Err(Error::Config("split.n_test must be >= 1".into())),
        Some(m) => Ok((train, split(&rest, m)?.0)),
        None => Ok((train, rest)),
    }
}

/// Everything an experiment produced.
#[derive(Debug, Clone)]
pub struct ExperimentOutcome {
    pub report: EvaluationReport,
    pub predictions: Vec<PredictionRow>,
    pub model: Model,
    pub report_text: String,
}

/// Loads or generates the series, embeds, splits, trains, forecasts the
/// test pairs and evaluates. Writes artifacts when `output.dir` is set.
pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentOutcome> {
    config.validate()?;
    let series = load_data(&config.data)?;
    let data = embed(&series, config.embedding)?;
    let (train, test) = split_dataset(&data, &config.split)?;
    let model = train_model(&config.model, &train)?;
    let predicted = model.predict_dataset(&test)?;
    let observed = test.targets();

    let mut report = EvaluationReport::compute(observed, &predicted)?;
    if config.evaluation.peaks && observed.len() >= 3 {
        report.peak_report = Some(peak_report(
            observed,
            &predicted,
            config.evaluation.peak_window,
            config.evaluation.top_m,
        )?);
    }

    let predictions: Vec<PredictionRow> = test
        .times()
        .iter()
        .zip(observed.iter().zip(&predicted))
        .map(|(&time, (&o, &p))| PredictionRow {
            time,
            observed: o,
            predicted: p,
        })
        .collect();
    let header = [
        ("model", model.kind().as_str().to_string()),
        ("embedding.dim", config.embedding.dim.to_string()),
        ("embedding.horizon", config.embedding.horizon.to_string()),
        ("n_train", train.len().to_string()),
    ];
    let report_text = io::format_report(&report, &header);

    if let Some(dir) = &config.output.dir {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let write = |name: &str, text: &str| {
            let path = dir.join(name);
            fs::write(&path, text).map_err(|e| Error::io(path, e))
        };
        write("predictions.csv", &io::format_predictions_csv(&predictions))?;
        write("report.txt", &report_text)?;
        if let Some(p) = &report.peak_report {
            write("peaks.txt", &io::format_peak_report(p))?;
        }
        io::save_model(&model, &dir.join("model.txt"))?;
    }

    Ok(ExperimentOutcome {
        report,
        predictions,
        model,
        report_text,
    })
}

/// Runs independent experiments on scoped threads; results keep input order.
pub fn run_sweep(configs: &[ExperimentConfig]) -> Vec<Result<ExperimentOutcome>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| scope.spawn(move || run_experiment(c)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|p| std::panic::resume_unwind(p)))
            .collect()
    })
}
