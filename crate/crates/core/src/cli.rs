//! Command-line front end. Data goes to the output stream, diagnostics and
//! errors to the error stream; every random choice derives from `--seed`.

use std::fmt::Write as _;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::dataset::{embedded_table2, Dataset, DatasetError, SplitSpec};
use crate::imgeo::{
    clean_mask, decode_gray, encode_pgm, export_features_csv, histogram, label, region_features,
    threshold_manual, threshold_otsu, CleanMode, ImageError, Precision, ScaleSpec, DEFAULT_BINS,
};
use crate::metrics::{self, EvalReport, MetricError};
use crate::regress::{
    load_model, save_model, train, ForestConfig, HuberConfig, Model, ModelError, ModelKind,
    Predict, SvrConfig, TrainConfig,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("file not found: {}", .0.display())]
    FileNotFound(PathBuf),
    #[error("output directory does not exist: {}", .0.display())]
    OutputDir(PathBuf),
    #[error("refusing to overwrite input file {}", .0.display())]
    OverwritesInput(PathBuf),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Dataset(#[from] DatasetError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error("write failed: {0}")]
    Output(#[from] io::Error),
}

#[derive(Debug, Parser)]
#[command(
    name = "weldkit",
    version,
    about = "Friction-stir spot weld depth regression and cross-section analysis"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit a model on a seeded train/test split and report both splits.
    Train(TrainArgs),
    /// Score a saved model on a labeled dataset.
    Evaluate(EvaluateArgs),
    /// Predict penetration depth (mm) for one parameter set.
    Predict(PredictArgs),
    /// Threshold, clean, label and measure a weld cross-section image.
    Analyze(AnalyzeArgs),
    /// Intensity histogram of an image as CSV.
    Histogram(HistogramArgs),
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct DataSource {
    /// CSV with columns rpm, dwell_s, axial_kn, depth_mm.
    #[arg(long, value_name = "PATH")]
    pub data: Option<PathBuf>,
    /// Use the embedded 27-run experimental table.
    #[arg(long)]
    pub builtin_table2: bool,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub source: DataSource,
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Seeds the split, bootstrap and coordinate order.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.2)]
    pub test_fraction: f64,
    /// Model file to write (ignored with --seeds).
    #[arg(long, value_name = "PATH", default_value = "model.json")]
    pub out: PathBuf,
    /// Run N splits with seeds seed..seed+N and report the median test R².
    #[arg(long, value_name = "N", conflicts_with = "no_split")]
    pub seeds: Option<u64>,
    /// Fit on every row and report the training block only.
    #[arg(long, conflicts_with = "test_fraction")]
    pub no_split: bool,
    #[command(flatten)]
    pub hyper: Hyperparameters,
}

#[derive(Debug, Args)]
pub struct Hyperparameters {
    /// Huber threshold in robust-scale units.
    #[arg(long, default_value_t = HuberConfig::default().delta)]
    pub delta: f64,
    /// Huber reweighting passes.
    #[arg(long, default_value_t = HuberConfig::default().max_iterations)]
    pub max_iter: usize,
    /// SVR box constraint.
    #[arg(long = "c", default_value_t = SvrConfig::default().c)]
    pub svr_c: f64,
    /// SVR tube half-width (standardized target units).
    #[arg(long, default_value_t = SvrConfig::default().epsilon)]
    pub epsilon: f64,
    /// SVR coordinate-descent pass limit.
    #[arg(long, default_value_t = SvrConfig::default().max_passes)]
    pub max_passes: usize,
    #[arg(long, default_value_t = ForestConfig::default().n_trees)]
    pub trees: usize,
    #[arg(long, default_value_t = ForestConfig::default().min_samples_leaf)]
    pub min_leaf: usize,
    /// Tree depth limit [default: unlimited].
    #[arg(long)]
    pub max_depth: Option<usize>,
}

impl Hyperparameters {
    pub fn train_config(&self, seed: u64) -> TrainConfig {
        TrainConfig {
            huber: HuberConfig {
                delta: self.delta,
                max_iterations: self.max_iter,
                ..HuberConfig::default()
            },
            svr: SvrConfig {
                c: self.svr_c,
                epsilon: self.epsilon,
                max_passes: self.max_passes,
                seed,
                ..SvrConfig::default()
            },
            forest: ForestConfig {
                n_trees: self.trees,
                min_samples_leaf: self.min_leaf,
                max_depth: self.max_depth,
                seed,
            },
        }
    }
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,
    #[command(flatten)]
    pub source: DataSource,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    #[arg(long, value_name = "PATH")]
    pub model_file: PathBuf,
    /// Rotational speed (rpm).
    #[arg(long)]
    pub rpm: f64,
    /// Dwell time (s).
    #[arg(long)]
    pub dwell: f64,
    /// Axial load (kN).
    #[arg(long)]
    pub load: f64,
}

/// `auto` (Otsu) or a fixed level; pixels `>= T` are foreground.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ThresholdMode {
    Auto,
    Fixed(u8),
}

impl FromStr for ThresholdMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(ThresholdMode::Auto);
        }
        s.parse()
            .map(ThresholdMode::Fixed)
            .map_err(|_| format!("expected `auto` or a level in 0..=255, got `{s}`"))
    }
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// P5 PGM or 8-bit PNG (grayscale or RGB).
    #[arg(value_name = "IMAGE")]
    pub image: PathBuf,
    /// Physical length of one pixel side, e.g. 0.5 for 0.5 µm/pixel.
    #[arg(long)]
    pub scale: f64,
    /// `auto` or a level 0..=255.
    #[arg(long, default_value = "auto")]
    pub threshold: ThresholdMode,
    #[arg(long, value_enum, default_value_t = CleanMode::Closing)]
    pub clean: CleanMode,
    /// Features CSV [default: standard output].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Also write the cleaned mask as P5 PGM.
    #[arg(long, value_name = "PATH")]
    pub mask_out: Option<PathBuf>,
    /// Print values with full precision instead of two decimals.
    #[arg(long)]
    pub full_precision: bool,
}

#[derive(Debug, Args)]
pub struct HistogramArgs {
    #[arg(value_name = "IMAGE")]
    pub image: PathBuf,
    #[arg(long, default_value_t = DEFAULT_BINS)]
    pub bins: usize,
    /// Histogram CSV [default: standard output].
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
}

/// Executes one parsed command.
pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Train(a) => cmd_train(a, out),
        Command::Evaluate(a) => cmd_evaluate(a, out),
        Command::Predict(a) => cmd_predict(a, out),
        Command::Analyze(a) => cmd_analyze(a, out, err),
        Command::Histogram(a) => cmd_histogram(a, out),
    }
}

/// Error metrics of one split. R² is `None` when that split's target is
/// constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scores {
    pub mae: f64,
    pub mse: f64,
    pub rmse: f64,
    pub r2: Option<f64>,
}

impl Scores {
    pub fn compute(actual: &[f64], predicted: &[f64]) -> Result<Self, MetricError> {
        match EvalReport::compute(actual, predicted) {
            Ok(r) => Ok(Scores {
                mae: r.mae,
                mse: r.mse,
                rmse: r.rmse,
                r2: Some(r.r2),
            }),
            Err(MetricError::ConstantTarget) => Ok(Scores {
                mae: metrics::mae(actual, predicted)?,
                mse: metrics::mse(actual, predicted)?,
                rmse: metrics::rmse(actual, predicted)?,
                r2: None,
            }),
            Err(e) => Err(e),
        }
    }
}

/// Train and test scores of one seeded split.
#[derive(Debug, Clone)]
pub struct SplitOutcome {
    pub model: Model,
    pub train: Scores,
    pub test: Scores,
    pub train_rows: usize,
    pub test_rows: usize,
}

/// Splits `data`, fits on the train side and scores both sides.
pub fn run_split(
    data: &Dataset,
    kind: ModelKind,
    cfg: &TrainConfig,
    split: &SplitSpec,
) -> Result<SplitOutcome, CliError> {
    let (train_set, test_set) = data.split(split)?;
    let (x_train, y_train) = (train_set.features(), train_set.targets()?);
    let (x_test, y_test) = (test_set.features(), test_set.targets()?);
    let model = train(kind, &x_train, &y_train, cfg)?;
    Ok(SplitOutcome {
        train: Scores::compute(&y_train, &model.predict_matrix(&x_train)?)?,
        test: Scores::compute(&y_test, &model.predict_matrix(&x_test)?)?,
        model,
        train_rows: train_set.len(),
        test_rows: test_set.len(),
    })
}

/// Middle value, or the mean of the two middle values.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let mid = v.len() / 2;
    Some(if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    })
}

fn require_input(path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::FileNotFound(path.to_path_buf()))
    }
}

fn require_output(path: &Path, inputs: &[&Path]) -> Result<(), CliError> {
    let parent = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    if !parent.is_dir() {
        return Err(CliError::OutputDir(parent.to_path_buf()));
    }
    if let Ok(target) = path.canonicalize() {
        for input in inputs {
            if input.canonicalize().is_ok_and(|i| i == target) {
                return Err(CliError::OverwritesInput(path.to_path_buf()));
            }
        }
    }
    Ok(())
}

fn read_text(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| io_error(path, source))
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    std::fs::write(path, bytes).map_err(|source| io_error(path, source))
}

fn io_error(path: &Path, source: io::Error) -> CliError {
    if source.kind() == io::ErrorKind::NotFound {
        CliError::FileNotFound(path.to_path_buf())
    } else {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

fn source_path(source: &DataSource) -> Option<&Path> {
    source.data.as_deref()
}

fn load_dataset(source: &DataSource) -> Result<Dataset, CliError> {
    match &source.data {
        Some(path) => Ok(Dataset::from_csv(&read_text(path)?)?),
        None => Ok(embedded_table2()),
    }
}

const REPORT_HEADER: &str = "split          MAE      MSE     RMSE       R²";

fn report_line(name: &str, r: &Scores) -> String {
    let r2 =
        r.r2.map_or_else(|| "n/a".to_string(), |v| format!("{v:.3}"));
    format!(
        "{name:<8} {:>8.3} {:>8.3} {:>8.3} {r2:>8}",
        r.mae, r.mse, r.rmse
    )
}

fn cmd_train(a: &TrainArgs, out: &mut dyn Write) -> Result<(), CliError> {
    if let Some(p) = source_path(&a.source) {
        require_input(p)?;
    }
    if a.seeds.is_none() {
        let inputs: Vec<&Path> = source_path(&a.source).into_iter().collect();
        require_output(&a.out, &inputs)?;
    }
    if a.seeds == Some(0) {
        return Err(CliError::Usage("--seeds must be at least 1".into()));
    }
    let first_split = SplitSpec::new(a.test_fraction, a.seed)?;
    let data = load_dataset(&a.source)?;

    let mut text = String::new();
    if let Some(n) = a.seeds {
        let last = a
            .seed
            .checked_add(n)
            .ok_or_else(|| CliError::Usage("seed range overflows".into()))?;
        let _ = writeln!(
            text,
            "model: {} (seeds {}..{last}, test fraction {})",
            a.model, a.seed, a.test_fraction
        );
        let _ = writeln!(text, "seed      test R²  train R²");
        let mut scores = Vec::with_capacity(n as usize);
        for seed in a.seed..last {
            let split = SplitSpec::new(a.test_fraction, seed)?;
            let outcome = run_split(&data, a.model, &a.hyper.train_config(seed), &split)?;
            let (test, train) = match (outcome.test.r2, outcome.train.r2) {
                (Some(t), Some(r)) => (t, r),
                _ => return Err(MetricError::ConstantTarget.into()),
            };
            let _ = writeln!(text, "{seed:<8} {test:>8.3} {train:>9.3}");
            scores.push(test);
        }
        let m = median(&scores).expect("at least one seed");
        let _ = writeln!(text, "median test R²: {m:.3}");
        out.write_all(text.as_bytes())?;
        return Ok(());
    }

    let model = if a.no_split {
        let (x, y) = (data.features(), data.targets()?);
        let model = train(a.model, &x, &y, &a.hyper.train_config(a.seed))?;
        let scores = Scores::compute(&y, &model.predict_matrix(&x)?)?;
        let _ = writeln!(text, "model: {} (seed {}, no split)", a.model, a.seed);
        let _ = writeln!(text, "rows: {} train / 0 test", data.len());
        let _ = writeln!(text, "{REPORT_HEADER}");
        let _ = writeln!(text, "{}", report_line("training", &scores));
        if scores.r2.is_none() {
            let _ = writeln!(text, "note: R² undefined for a constant target");
        }
        model
    } else {
        let outcome = run_split(&data, a.model, &a.hyper.train_config(a.seed), &first_split)?;
        let _ = writeln!(
            text,
            "model: {} (seed {}, test fraction {})",
            a.model, a.seed, a.test_fraction
        );
        let _ = writeln!(
            text,
            "rows: {} train / {} test",
            outcome.train_rows, outcome.test_rows
        );
        let _ = writeln!(text, "{REPORT_HEADER}");
        let _ = writeln!(text, "{}", report_line("testing", &outcome.test));
        let _ = writeln!(text, "{}", report_line("training", &outcome.train));
        if outcome.test.r2.is_none() || outcome.train.r2.is_none() {
            let _ = writeln!(text, "note: R² undefined for a constant target");
        }
        outcome.model
    };
    write_file(&a.out, save_model(&model).as_bytes())?;
    let _ = writeln!(text, "model written to {}", a.out.display());
    out.write_all(text.as_bytes())?;
    Ok(())
}

fn read_model(path: &Path) -> Result<Model, CliError> {
    require_input(path)?;
    Ok(load_model(&read_text(path)?)?)
}

fn cmd_evaluate(a: &EvaluateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    require_input(&a.model_file)?;
    if let Some(p) = source_path(&a.source) {
        require_input(p)?;
    }
    let model = read_model(&a.model_file)?;
    let data = load_dataset(&a.source)?;
    let targets = data.targets()?;
    let predictions = model.predict_matrix(&data.features())?;
    let report = EvalReport::compute(&targets, &predictions)?;
    let scores = Scores {
        mae: report.mae,
        mse: report.mse,
        rmse: report.rmse,
        r2: Some(report.r2),
    };
    writeln!(out, "model: {}", model.kind())?;
    writeln!(out, "rows: {}", data.len())?;
    writeln!(out, "{REPORT_HEADER}")?;
    writeln!(out, "{}", report_line("data", &scores))?;
    Ok(())
}

fn cmd_predict(a: &PredictArgs, out: &mut dyn Write) -> Result<(), CliError> {
    for (name, v) in [("--rpm", a.rpm), ("--dwell", a.dwell), ("--load", a.load)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(CliError::Usage(format!(
                "{name} must be a finite positive number, got {v}"
            )));
        }
    }
    let model = read_model(&a.model_file)?;
    let depth = model.predict(&[a.rpm, a.dwell, a.load])?;
    writeln!(out, "{depth:.3}")?;
    Ok(())
}

fn cmd_analyze(a: &AnalyzeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    require_input(&a.image)?;
    for path in a.out.iter().chain(&a.mask_out) {
        require_output(path, &[&a.image])?;
    }
    let scale = ScaleSpec::new(a.scale)?;

    let bytes = std::fs::read(&a.image).map_err(|e| io_error(&a.image, e))?;
    let gray = decode_gray(&bytes)?;
    let level = match a.threshold {
        ThresholdMode::Auto => threshold_otsu(&gray)?,
        ThresholdMode::Fixed(t) => t,
    };
    let mask = clean_mask(&threshold_manual(&gray, level), a.clean);
    let labels = label(&mask);
    let features = region_features(&labels, scale)?;
    let precision = if a.full_precision {
        Precision::Full
    } else {
        Precision::Fixed2
    };
    let csv = export_features_csv(&features, precision);

    if let Some(path) = &a.mask_out {
        write_file(path, &encode_pgm(&mask.to_gray()))?;
    }
    let summary = format!("threshold: {level}\nregions: {}\n", features.len());
    match &a.out {
        Some(path) => {
            write_file(path, csv.as_bytes())?;
            out.write_all(summary.as_bytes())?;
        }
        None => {
            out.write_all(csv.as_bytes())?;
            err.write_all(summary.as_bytes())?;
        }
    }
    Ok(())
}

fn cmd_histogram(a: &HistogramArgs, out: &mut dyn Write) -> Result<(), CliError> {
    require_input(&a.image)?;
    if let Some(path) = &a.out {
        require_output(path, &[&a.image])?;
    }
    let bytes = std::fs::read(&a.image).map_err(|e| io_error(&a.image, e))?;
    let gray = decode_gray(&bytes)?;
    let hist = histogram(&gray, a.bins)?;
    let csv = hist.to_csv(gray.pixels().len() as u64);
    match &a.out {
        Some(path) => write_file(path, csv.as_bytes())?,
        None => out.write_all(csv.as_bytes())?,
    }
    Ok(())
}
