//! `belpm` command-line interface: one subcommand per pipeline stage plus a
//! concurrent experiment runner.
//!
//! Exit status: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numeric failure.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use belpm_core::io::GapPolicy;
use belpm_core::{ErrorClass, KernelKind, OrbitofrontalRule};
use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "belpm", version, about = "Brain-emotional-learning time-series forecasting")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a synthetic series as CSV.
    Gen(GenArgs),
    /// Print the delay-embedded (window, target) pairs of a series.
    Embed(EmbedArgs),
    /// Train a model on a series and save it.
    Train(TrainArgs),
    /// Forecast every embeddable window of a series with a saved model.
    Predict(PredictArgs),
    /// Score a predictions file (metrics and peaks).
    Eval(EvalArgs),
    /// Run one or more experiment configs concurrently.
    Bench(BenchArgs),
    /// Match observed against forecast peaks in a predictions file.
    Peaks(PeaksArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Source {
    MackeyGlass,
    Logistic,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[arg(long, value_enum)]
    source: Source,
    #[arg(long)]
    n: usize,
    #[arg(long, default_value_t = 17)]
    tau: usize,
    /// Initial value (defaults: 1.2 for mackey-glass, 0.3 for logistic).
    #[arg(long)]
    x0: Option<f64>,
    #[arg(long, default_value_t = 100)]
    warmup: usize,
    #[arg(long, default_value_t = 3.9)]
    r: f64,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DataArgs {
    /// Series CSV (`value` or `time,value` lines).
    #[arg(long)]
    data: PathBuf,
    /// Value marking a missing observation.
    #[arg(long)]
    missing_sentinel: Option<f64>,
    /// `error` or `linear-interpolate`.
    #[arg(long, default_value = "error")]
    gap_policy: GapPolicy,
}

#[derive(Args, Debug)]
struct EmbeddingArgs {
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 1)]
    horizon: usize,
}

#[derive(Args, Debug)]
struct EmbedArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    embedding: EmbeddingArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Kind {
    Belpm,
    Wknn,
    ClassicBel,
}

#[derive(Args, Debug)]
struct TrainArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    embedding: EmbeddingArgs,
    /// Train on the first `n_train` pairs only.
    #[arg(long)]
    n_train: Option<usize>,
    #[arg(long, value_enum, default_value = "belpm")]
    model: Kind,
    #[arg(long, default_value_t = 8)]
    k_a: usize,
    #[arg(long, default_value_t = 8)]
    k_o: usize,
    #[arg(long, default_value = "exponential")]
    kernel_a: KernelKind,
    #[arg(long, default_value = "exponential")]
    kernel_o: KernelKind,
    #[arg(long, default_value_t = 0.05)]
    lr: f64,
    #[arg(long, default_value_t = 50)]
    epochs: usize,
    #[arg(long, default_value_t = 1e-8)]
    lambda: f64,
    /// Neighbor count for wknn.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long, default_value_t = 0.1)]
    beta: f64,
    /// Orbitofrontal rule for classic-bel: `reinforcement` or `output-error`.
    #[arg(long, default_value = "reinforcement", value_parser = parse_rule)]
    rule: OrbitofrontalRule,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
}

fn parse_rule(s: &str) -> Result<OrbitofrontalRule, String> {
    match s {
        "reinforcement" => Ok(OrbitofrontalRule::Reinforcement),
        "output-error" => Ok(OrbitofrontalRule::OutputError),
        other => Err(format!("unknown rule '{other}'")),
    }
}

#[derive(Args, Debug)]
struct PredictArgs {
    /// Model file written by `train`.
    #[arg(long)]
    model: PathBuf,
    #[command(flatten)]
    data: DataArgs,
    /// Predictions CSV to write; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PeakArgs {
    #[arg(long, default_value_t = 2)]
    peak_window: usize,
    /// Observed peaks to keep (highest first); all when absent.
    #[arg(long)]
    top_m: Option<usize>,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// `time,observed,predicted` CSV.
    #[arg(long)]
    predictions: PathBuf,
    #[command(flatten)]
    peaks: PeakArgs,
    #[arg(long)]
    no_peaks: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PeaksArgs {
    #[arg(long)]
    predictions: PathBuf,
    #[command(flatten)]
    peaks: PeakArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// TOML experiment configs.
    #[arg(required = true)]
    configs: Vec<PathBuf>,
}

fn exit_code(class: ErrorClass) -> ExitCode {
    match class {
        ErrorClass::Config => ExitCode::from(1),
        ErrorClass::Data => ExitCode::from(2),
        ErrorClass::Numeric => ExitCode::from(3),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Embed(a) => commands::embed(a),
        Command::Train(a) => commands::train(a),
        Command::Predict(a) => commands::predict(a),
        Command::Eval(a) => commands::eval(a),
        Command::Bench(a) => commands::bench(a),
        Command::Peaks(a) => commands::peaks(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(e.class())
        }
    }
}
