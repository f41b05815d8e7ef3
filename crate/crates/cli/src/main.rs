//! `lwgesture`: generate, preprocess, train, classify and evaluate light-wave
//! gesture traces from the command line.

mod plot;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicBool, Ordering};

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use lightwave_gesture::dataset_io::{self, DataFormat};
use lightwave_gesture::eval::{
    cross_validate, format_accuracy, make_folds, parse_report_csv, render_report, EvalReport,
    KnnConfig, ReportFormat,
};
use lightwave_gesture::knn::{fit, KnnModel, Metric, DEFAULT_K};
use lightwave_gesture::pipeline::{preprocess, preprocess_stages, PipelineConfig};
use lightwave_gesture::segment::{detect_segment, SegmentConfig};
use lightwave_gesture::synth::{GenConfig, Generator, TemplateSet};
use lightwave_gesture::trace::{GestureLabel, DEFAULT_SAMPLE_RATE_HZ};
use lightwave_gesture::wavelet::{denoise, DenoiseConfig, ThresholdMode, ThresholdRule, Wavelet};

#[derive(Parser)]
#[command(
    name = "lwgesture",
    version,
    about = "Light-wave gesture recognition pipeline"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic labeled dataset.
    Generate(GenerateArgs),
    /// Wavelet-denoise every trace of a file.
    Denoise(DenoiseCmd),
    /// Detect the gesture segment of every trace (JSON output).
    Segment(SegmentCmd),
    /// Preprocess a labeled file and store a KNN model.
    Train(TrainArgs),
    /// Label traces with a stored model (CSV output).
    Classify(ClassifyArgs),
    /// K-fold cross-validation of the full pipeline.
    Crossval(CrossvalArgs),
    /// Re-render a stored evaluation report.
    Report(ReportArgs),
    /// Emit plot-ready CSV.
    Plotdata(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Ambient {
    On,
    Off,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = lightwave_gesture::synth::DEFAULT_SEED)]
    seed: u64,
    /// Traces per gesture class.
    #[arg(long, default_value_t = lightwave_gesture::synth::DEFAULT_REPS)]
    reps: usize,
    /// Hand-to-sensor distance in cm.
    #[arg(long, default_value_t = 20.0)]
    distance: f64,
    #[arg(long, value_enum, default_value = "on")]
    ambient: Ambient,
    /// White-noise SNR at 20 cm, in dB.
    #[arg(long)]
    snr_db: Option<f64>,
    /// Template config (TOML); the bundled set by default.
    #[arg(long)]
    templates: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
    /// csv or json; taken from the --out extension if omitted.
    #[arg(long)]
    format: Option<DataFormat>,
}

#[derive(Args, Clone)]
struct DenoiseArgs {
    /// haar, db2 or db4.
    #[arg(long, default_value = "db4")]
    wavelet: Wavelet,
    #[arg(long, default_value_t = 4)]
    levels: usize,
    /// `universal` or a non-negative number.
    #[arg(long, default_value = "universal")]
    threshold: ThresholdRule,
    /// soft or hard.
    #[arg(long, default_value = "soft")]
    mode: ThresholdMode,
}

impl DenoiseArgs {
    fn config(&self) -> DenoiseConfig {
        DenoiseConfig {
            wavelet: self.wavelet,
            levels: self.levels,
            threshold: self.threshold,
            mode: self.mode,
        }
    }
}

#[derive(Args, Clone)]
struct SegmentArgs {
    /// Envelope threshold as a fraction of its peak.
    #[arg(long, default_value_t = 0.2)]
    rel_threshold: f64,
    /// Envelope window in seconds.
    #[arg(long, default_value_t = 0.25)]
    window: f64,
    /// Margin added on each side, in seconds.
    #[arg(long, default_value_t = 0.1)]
    margin: f64,
    /// Length of the padded feature vector.
    #[arg(long, default_value_t = 600)]
    fixed_len: usize,
}

impl SegmentArgs {
    fn config(&self) -> SegmentConfig {
        SegmentConfig {
            envelope_window_s: self.window,
            rel_threshold: self.rel_threshold,
            margin_s: self.margin,
            fixed_len: self.fixed_len,
        }
    }
}

#[derive(Args, Clone)]
struct PipelineArgs {
    #[command(flatten)]
    denoise: DenoiseArgs,
    #[command(flatten)]
    segment: SegmentArgs,
}

impl PipelineArgs {
    fn config(&self) -> Result<PipelineConfig, Failure> {
        let cfg = PipelineConfig {
            denoise: self.denoise.config(),
            segment: self.segment.config(),
        };
        cfg.denoise.validate().map_err(usage)?;
        cfg.segment
            .validate(DEFAULT_SAMPLE_RATE_HZ)
            .map_err(usage)?;
        Ok(cfg)
    }
}

#[derive(Args)]
struct Input {
    /// Trace file (CSV or JSON).
    #[arg(long)]
    data: PathBuf,
    /// csv or json; taken from the --data extension if omitted.
    #[arg(long)]
    data_format: Option<DataFormat>,
}

impl Input {
    fn format(&self) -> DataFormat {
        self.data_format
            .unwrap_or_else(|| DataFormat::from_path(&self.data))
    }
}

#[derive(Args)]
struct DenoiseCmd {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    denoise: DenoiseArgs,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    format: Option<DataFormat>,
}

#[derive(Args)]
struct SegmentCmd {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    segment: SegmentArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// euclidean or manhattan.
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ClassifyArgs {
    #[command(flatten)]
    input: Input,
    /// Model written by `train`.
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CrossvalArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    folds: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Keep class proportions equal across folds.
    #[arg(
        long,
        default_value_t = true,
        num_args = 0..=1,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    stratified: bool,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value = "euclidean")]
    metric: Metric,
    /// text, csv or json; taken from the --out extension if omitted.
    #[arg(long)]
    report: Option<ReportFormat>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Report written by `crossval` as JSON or CSV.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "text")]
    report: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PlotKind {
    TraceStages,
    DistanceAccuracy,
}

#[derive(Args)]
struct PlotArgs {
    #[arg(long, value_enum)]
    kind: PlotKind,
    /// Trace file, for trace-stages.
    #[arg(long)]
    data: Option<PathBuf>,
    /// Trace position in the file, for trace-stages.
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// JSON or CSV reports, for distance-accuracy.
    #[arg(long, num_args = 1..)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    pipeline: PipelineArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// A model file: the KNN memory plus the preprocessing it was trained with.
#[derive(Serialize, Deserialize)]
struct ModelFile {
    #[serde(flatten)]
    model: KnnModel,
    pipeline: PipelineConfig,
}

/// Set once results have gone to stdout; the summary then goes to stderr.
static DATA_ON_STDOUT: AtomicBool = AtomicBool::new(false);

enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Runtime(e)
    }
}

impl From<lightwave_gesture::Error> for Failure {
    fn from(e: lightwave_gesture::Error) -> Self {
        Failure::Runtime(e.into())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(summary) => {
            if DATA_ON_STDOUT.load(Ordering::Relaxed) {
                eprintln!("{summary}");
            } else {
                println!("{summary}");
            }
            ExitCode::SUCCESS
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

fn run(command: Command) -> Result<String, Failure> {
    match command {
        Command::Generate(a) => generate(a),
        Command::Denoise(a) => denoise_cmd(a),
        Command::Segment(a) => segment_cmd(a),
        Command::Train(a) => train(a),
        Command::Classify(a) => classify(a),
        Command::Crossval(a) => crossval(a),
        Command::Report(a) => report(a),
        Command::Plotdata(a) => plotdata(a),
    }
}

/// Writes to `out` atomically, or to stdout when no path was given.
fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(path) => Ok(dataset_io::write_atomic(path, text.as_bytes())?),
        None => {
            DATA_ON_STDOUT.store(true, Ordering::Relaxed);
            print!("{text}");
            Ok(())
        }
    }
}

fn generate(a: GenerateArgs) -> Result<String, Failure> {
    let defaults = GenConfig::default();
    let cfg = GenConfig {
        seed: a.seed,
        reps_per_class: a.reps,
        distance_cm: a.distance,
        ambient_on: matches!(a.ambient, Ambient::On),
        snr_ref_db: a.snr_db.unwrap_or(defaults.snr_ref_db),
        ..defaults
    };
    cfg.validate().map_err(usage)?;
    let templates = match &a.templates {
        Some(p) => TemplateSet::load(p)?,
        None => TemplateSet::default(),
    };
    let ds = Generator::new(cfg, templates)?.generate_dataset()?;
    let format = a.format.unwrap_or_else(|| DataFormat::from_path(&a.out));
    dataset_io::save_dataset(&ds, &a.out, format)?;
    Ok(format!(
        "wrote {} traces ({} cm, ambient {}, seed {}) to {}",
        ds.len(),
        cfg.distance_cm,
        if cfg.ambient_on { "on" } else { "off" },
        cfg.seed,
        a.out.display()
    ))
}

fn denoise_cmd(a: DenoiseCmd) -> Result<String, Failure> {
    let cfg = a.denoise.config();
    cfg.validate().map_err(usage)?;
    let traces = dataset_io::read_traces(&a.input.data, a.input.format())?;
    let clean = traces
        .iter()
        .enumerate()
        .map(|(i, t)| denoise(t, &cfg).with_context(|| format!("trace {i}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let format = a.format.unwrap_or_else(|| DataFormat::from_path(&a.out));
    dataset_io::write_traces(&clean, &a.out, format)?;
    Ok(format!(
        "denoised {} traces into {}",
        clean.len(),
        a.out.display()
    ))
}

#[derive(Serialize)]
struct SegmentRow {
    index: usize,
    label: Option<GestureLabel>,
    start_idx: usize,
    end_idx: usize,
}

fn segment_cmd(a: SegmentCmd) -> Result<String, Failure> {
    let cfg = a.segment.config();
    cfg.validate(DEFAULT_SAMPLE_RATE_HZ).map_err(usage)?;
    let traces = dataset_io::read_traces(&a.input.data, a.input.format())?;
    let rows = traces
        .iter()
        .enumerate()
        .map(|(index, t)| {
            let seg = detect_segment(t, &cfg).with_context(|| format!("trace {index}"))?;
            Ok(SegmentRow {
                index,
                label: t.label(),
                start_idx: seg.start_idx,
                end_idx: seg.end_idx,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;
    let mut json = serde_json::to_string_pretty(&rows).context("serialising segments")?;
    json.push('\n');
    emit(a.out.as_deref(), &json)?;
    Ok(format!("segmented {} traces", rows.len()))
}

fn train(a: TrainArgs) -> Result<String, Failure> {
    let pipeline = a.pipeline.config()?;
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let ds = dataset_io::load_dataset(&a.input.data, a.input.format())?;
    let vectors = ds
        .traces()
        .iter()
        .enumerate()
        .map(|(i, t)| preprocess(t, &pipeline).with_context(|| format!("trace {i}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    let model = fit(vectors, a.k, a.metric)?;
    let file = ModelFile { model, pipeline };
    let json = serde_json::to_string(&file).context("serialising model")?;
    dataset_io::write_atomic(&a.out, json.as_bytes())?;
    Ok(format!(
        "trained {} model with k = {} on {} traces into {}",
        a.metric,
        a.k,
        file.model.len(),
        a.out.display()
    ))
}

fn classify(a: ClassifyArgs) -> Result<String, Failure> {
    let text = std::fs::read_to_string(&a.model)
        .with_context(|| format!("reading {}", a.model.display()))?;
    let file: ModelFile = serde_json::from_str(&text)
        .with_context(|| format!("{}: not a model file", a.model.display()))?;
    let traces = dataset_io::read_traces(&a.input.data, a.input.format())?;
    let mut out = String::from("index,label,predicted\n");
    let (mut labeled, mut correct) = (0usize, 0usize);
    for (i, t) in traces.iter().enumerate() {
        let fv = preprocess(t, &file.pipeline).with_context(|| format!("trace {i}"))?;
        let p = file
            .model
            .predict(&fv.values)
            .with_context(|| format!("trace {i}"))?;
        let truth = t.label().map(|l| l.to_string()).unwrap_or_default();
        if let Some(l) = t.label() {
            labeled += 1;
            correct += usize::from(l == p.label);
        }
        out.push_str(&format!("{i},{truth},{}\n", p.label));
    }
    emit(a.out.as_deref(), &out)?;
    let mut summary = format!("classified {} traces", traces.len());
    if labeled > 0 {
        summary += &format!(
            ", {correct}/{labeled} correct ({:.2}%)",
            100.0 * correct as f64 / labeled as f64
        );
    }
    Ok(summary)
}

fn report_format_for(path: Option<&Path>) -> ReportFormat {
    match path.and_then(|p| p.extension()).and_then(|e| e.to_str()) {
        Some("json") => ReportFormat::Json,
        Some("csv") => ReportFormat::Csv,
        _ => ReportFormat::Text,
    }
}

fn crossval(a: CrossvalArgs) -> Result<String, Failure> {
    let pipeline = a.pipeline.config()?;
    if a.k == 0 {
        return Err(usage("--k must be at least 1"));
    }
    let ds = dataset_io::load_dataset(&a.input.data, a.input.format())?;
    let plan = make_folds(&ds, a.folds as usize, a.seed, a.stratified)?;
    let knn = KnnConfig {
        k: a.k,
        metric: a.metric,
    };
    let r = cross_validate(&ds, &pipeline, &knn, &plan)?;
    let format = a
        .report
        .unwrap_or_else(|| report_format_for(a.out.as_deref()));
    emit(a.out.as_deref(), &render_report(&r, format))?;
    Ok(format!(
        "{}-fold accuracy {} over {} traces ({} excluded)",
        r.folds,
        format_accuracy(r.mean_accuracy, r.accuracy_sd),
        r.n_traces,
        r.excluded
    ))
}

fn read_report(path: &Path) -> anyhow::Result<EvalReport> {
    let text =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = if report_format_for(Some(path)) == ReportFormat::Csv {
        parse_report_csv(&text).map_err(anyhow::Error::from)
    } else {
        serde_json::from_str(&text).map_err(anyhow::Error::from)
    };
    parsed.with_context(|| format!("{}: not an evaluation report", path.display()))
}

fn report(a: ReportArgs) -> Result<String, Failure> {
    let r = read_report(&a.input)?;
    emit(a.out.as_deref(), &render_report(&r, a.report))?;
    Ok(format!(
        "{}-fold accuracy {}",
        r.folds,
        format_accuracy(r.mean_accuracy, r.accuracy_sd)
    ))
}

fn plotdata(a: PlotArgs) -> Result<String, Failure> {
    let pipeline = a.pipeline.config()?;
    match a.kind {
        PlotKind::TraceStages => {
            let data = a
                .data
                .as_ref()
                .ok_or_else(|| usage("--kind trace-stages needs --data"))?;
            let traces = dataset_io::read_traces(data, DataFormat::from_path(data))?;
            let trace = traces.get(a.index).ok_or_else(|| {
                anyhow::anyhow!("{}: no trace at index {}", data.display(), a.index)
            })?;
            let stages = preprocess_stages(trace, &pipeline)
                .with_context(|| format!("trace {}", a.index))?;
            emit(
                a.out.as_deref(),
                &plot::trace_stages_csv(&stages, trace.meta().sample_rate_hz),
            )?;
            Ok(format!(
                "trace {} stages, segment {}..={}",
                a.index, stages.segment.start_idx, stages.segment.end_idx
            ))
        }
        PlotKind::DistanceAccuracy => {
            if a.inputs.is_empty() {
                return Err(usage("--kind distance-accuracy needs --inputs"));
            }
            let reports = a
                .inputs
                .iter()
                .map(|p| Ok((p.display().to_string(), read_report(p)?)))
                .collect::<anyhow::Result<Vec<_>>>()?;
            emit(a.out.as_deref(), &plot::distance_accuracy_csv(&reports)?)?;
            Ok(format!("{} distance-accuracy rows", reports.len()))
        }
    }
}
