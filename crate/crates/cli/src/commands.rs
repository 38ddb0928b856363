use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::Path;

use belpm_core::experiment::{run_sweep, train_model, ExperimentConfig, ModelConfig};
use belpm_core::io::{
    format_peak_report, format_predictions_csv, format_report, format_series_csv, load_model, load_series_csv,
    parse_predictions_csv, save_model, PredictionRow, SeriesFile,
};
use belpm_core::synthetic::{logistic, mackey_glass};
use belpm_core::series::embed as embed_series;
use belpm_core::{peak_report, split, BelpmConfig, Embedding, Error, EvaluationReport, Forecaster, Result, TimeSeries};

use crate::{BenchArgs, DataArgs, EmbedArgs, EvalArgs, GenArgs, Kind, PeaksArgs, PredictArgs, Source, TrainArgs};

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| Error::Io {
            path: path.to_path_buf(),
            source: e,
        }),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes()).map_err(|e| Error::Io {
                path: "<stdout>".into(),
                source: e,
            })
        }
    }
}

fn load(data: &DataArgs) -> Result<TimeSeries> {
    if !data.data.is_file() {
        return Err(Error::Config(format!("data file not found: {}", data.data.display())));
    }
    load_series_csv(&SeriesFile {
        path: data.data.clone(),
        missing_sentinel: data.missing_sentinel,
        gap_policy: data.gap_policy,
    })
}

pub fn gen(a: GenArgs) -> Result<()> {
    let series = match a.source {
        Source::MackeyGlass => mackey_glass(a.n, a.tau, a.x0.unwrap_or(1.2), a.warmup)?,
        Source::Logistic => logistic(a.n, a.r, a.x0.unwrap_or(0.3))?,
    };
    emit(a.out.as_deref(), &format_series_csv(&series))
}

pub fn embed(a: EmbedArgs) -> Result<()> {
    let series = load(&a.data)?;
    let data = embed_series(&series, Embedding::new(a.embedding.dim, a.embedding.horizon)?)?;
    let mut text = String::from("time");
    for i in 1..=data.dim() {
        let _ = write!(text, ",x{i}");
    }
    text.push_str(",target\n");
    for ((x, t), time) in data.inputs().zip(data.targets()).zip(data.times()) {
        let _ = write!(text, "{time}");
        for v in x {
            let _ = write!(text, ",{v}");
        }
        let _ = writeln!(text, ",{t}");
    }
    emit(a.out.as_deref(), &text)
}

pub fn train(a: TrainArgs) -> Result<()> {
    let series = load(&a.data)?;
    let data = embed_series(&series, Embedding::new(a.embedding.dim, a.embedding.horizon)?)?;
    let data = match a.n_train {
        Some(n) if n > data.len() => {
            return Err(Error::Config(format!(
                "--n-train {n} exceeds the {} embedded pairs",
                data.len()
            )))
        }
        Some(n) => split(&data, n)?.0,
        None => data,
    };
    let config = match a.model {
        Kind::Belpm => ModelConfig::Belpm(BelpmConfig {
            k_a: a.k_a,
            k_o: a.k_o,
            kernel_a: a.kernel_a,
            kernel_o: a.kernel_o,
            lr: a.lr,
            epochs: a.epochs,
            lambda: a.lambda,
        }),
        Kind::Wknn => ModelConfig::Wknn { k: a.k },
        Kind::ClassicBel => ModelConfig::ClassicBel {
            alpha: a.alpha,
            beta: a.beta,
            epochs: a.epochs,
            rule: a.rule,
        },
    };
    let model = train_model(&config, &data)?;
    save_model(&model, &a.out)?;
    eprintln!(
        "trained {} on {} pairs, saved to {}",
        model.kind().as_str(),
        data.len(),
        a.out.display()
    );
    Ok(())
}

pub fn predict(a: PredictArgs) -> Result<()> {
    let model = load_model(&a.model)?;
    let series = load(&a.data)?;
    let data = embed_series(&series, model.embedding())?;
    let predicted = model.predict_dataset(&data)?;
    let rows: Vec<PredictionRow> = data
        .times()
        .iter()
        .zip(data.targets().iter().zip(&predicted))
        .map(|(&time, (&observed, &predicted))| PredictionRow {
            time,
            observed,
            predicted,
        })
        .collect();
    emit(a.out.as_deref(), &format_predictions_csv(&rows))
}

fn read_predictions(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let text = fs::read_to_string(path).map_err(|e| Error::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    let rows = parse_predictions_csv(&text)?;
    Ok(rows.iter().map(|r| (r.observed, r.predicted)).unzip())
}

pub fn eval(a: EvalArgs) -> Result<()> {
    let (observed, predicted) = read_predictions(&a.predictions)?;
    let mut report = EvaluationReport::compute(&observed, &predicted)?;
    if !a.no_peaks && observed.len() >= 3 {
        report.peak_report = Some(peak_report(&observed, &predicted, a.peaks.peak_window, a.peaks.top_m)?);
    }
    emit(a.out.as_deref(), &format_report(&report, &[]))
}

pub fn peaks(a: PeaksArgs) -> Result<()> {
    let (observed, predicted) = read_predictions(&a.predictions)?;
    let report = peak_report(&observed, &predicted, a.peaks.peak_window, a.peaks.top_m)?;
    emit(a.out.as_deref(), &format_peak_report(&report))
}

/// Runs every config concurrently and prints one summary line each; the
/// first failure (in argument order) decides the exit status.
pub fn bench(a: BenchArgs) -> Result<()> {
    let configs = a
        .configs
        .iter()
        .map(|p| ExperimentConfig::load(p))
        .collect::<Result<Vec<_>>>()?;
    let outcomes = run_sweep(&configs);
    let mut first_err = None;
    let mut text = String::from("config,model,n,nmse,mse,correlation,peaks_exact,peaks_delayed,peaks_missed\n");
    for (path, outcome) in a.configs.iter().zip(outcomes) {
        match outcome {
            Ok(o) => {
                let r = &o.report;
                let (e, d, m) = r
                    .peak_report
                    .as_ref()
                    .map_or((String::new(), String::new(), String::new()), |p| {
                        (
                            p.identified_exact.to_string(),
                            p.identified_delayed.to_string(),
                            p.missed.to_string(),
                        )
                    });
                let _ = writeln!(
                    text,
                    "{},{},{},{:.6e},{:.6e},{:.6},{e},{d},{m}",
                    path.display(),
                    o.model.kind().as_str(),
                    r.n,
                    r.nmse,
                    r.mse,
                    r.correlation
                );
            }
            Err(err) => {
                eprintln!("{}: {err}", path.display());
                first_err.get_or_insert(err);
            }
        }
    }
    emit(None, &text)?;
    first_err.map_or(Ok(()), Err)
}
