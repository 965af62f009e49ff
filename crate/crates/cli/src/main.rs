use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use tvr_core::io::{read_dataset, read_predictions, render_schematic, stats_report, write_dataset, Dataset, IoError};
use tvr_core::metrics::{evaluate_predictions, order_analysis, MultiScore};
use tvr_core::sampler::{generate_dataset, SplitSize, ViewMode};
use tvr_core::transform::solve;
use tvr_core::{GeneratorConfig, Sample, Setting, View};

#[derive(Parser)]
#[command(name = "tvr", version, about = "Generate, evaluate and serve transformation reasoning datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a dataset directory.
    Generate(GenerateArgs),
    /// Score a prediction file against a dataset.
    Evaluate(EvaluateArgs),
    /// Print balance statistics.
    Stats(StatsArgs),
    /// Write the SVG schematic of one sample.
    Render(RenderArgs),
    /// Print the solver's answer for one sample.
    Solve(SampleArgs),
    /// Serve the HTTP API.
    Serve(ServeArgs),
}

#[derive(Args)]
struct DataArg {
    /// Dataset directory.
    #[arg(long, env = "TVR_DATA")]
    data: PathBuf,
}

#[derive(Args)]
struct GenerateArgs {
    #[arg(long, value_parser = parse_setting, default_value = "event")]
    setting: Setting,
    /// Samples in the `test` split. Ignored when --splits is given.
    #[arg(long, default_value_t = 1000)]
    size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value = "exhaustive")]
    views: ViewsArg,
    /// Comma-separated `name=size` pairs, e.g. `train=8000,val=1000,test=1000`.
    #[arg(long, value_delimiter = ',', value_parser = parse_split)]
    splits: Vec<SplitSize>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViewsArg {
    Exhaustive,
    Sampled,
}

#[derive(Args)]
struct EvaluateArgs {
    #[command(flatten)]
    data: DataArg,
    /// JSONL file of `{id, transformations}` records.
    #[arg(long)]
    pred: PathBuf,
    /// Also analyse the order-sensitive subset.
    #[arg(long)]
    order_analysis: bool,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    order_seed: u64,
    /// Print machine-readable JSON instead of a table.
    #[arg(long)]
    json: bool,
    /// Worker threads (defaults to all cores).
    #[arg(long)]
    jobs: Option<usize>,
}

#[derive(Args)]
struct StatsArgs {
    #[command(flatten)]
    data: DataArg,
    /// Restrict to one split.
    #[arg(long)]
    split: Option<String>,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    data: DataArg,
    #[arg(long)]
    id: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum SceneArg {
    Initial,
    Final,
}

#[derive(Args)]
struct RenderArgs {
    #[command(flatten)]
    sample: SampleArgs,
    /// Camera; defaults to the sample's own view.
    #[arg(long, value_parser = parse_view)]
    view: Option<View>,
    #[arg(long, value_enum, default_value = "final")]
    scene: SceneArg,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ServeArgs {
    #[command(flatten)]
    data: DataArg,
    #[arg(long, default_value = "127.0.0.1:8080")]
    addr: SocketAddr,
    /// Session store directory (defaults to DATA/sessions).
    #[arg(long)]
    sessions: Option<PathBuf>,
    /// Serve references and solutions to every client.
    #[arg(long)]
    trusted: bool,
}

fn parse_setting(s: &str) -> Result<Setting, String> {
    s.parse()
}

fn parse_view(s: &str) -> Result<View, String> {
    s.parse()
}

fn parse_split(part: &str) -> Result<SplitSize, String> {
    let (name, size) = part.split_once('=').ok_or_else(|| format!("`{part}` is not name=size"))?;
    let size = size.trim().parse().map_err(|_| format!("`{size}` is not a sample count"))?;
    Ok(SplitSize { name: name.trim().to_string(), size })
}

/// A failure reported as `{"code": ..., "message": ...}` on stderr.
#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error("{0}")]
    Generate(String),
    #[error("{0}")]
    Evaluate(String),
    #[error("unknown sample `{0}`")]
    UnknownSample(String),
    #[error("unknown split `{0}`")]
    UnknownSplit(String),
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Serve(String),
}

impl CliError {
    fn code(&self) -> &'static str {
        match self {
            CliError::Io(IoError::MalformedRecord { .. }) => "malformed_record",
            CliError::Io(IoError::ChecksumMismatch { .. }) => "checksum_mismatch",
            CliError::Io(IoError::VersionMismatch { .. }) => "version_mismatch",
            CliError::Io(_) => "io",
            CliError::Generate(_) => "generation_failed",
            CliError::Evaluate(_) => "evaluation_failed",
            CliError::UnknownSample(_) => "unknown_sample",
            CliError::UnknownSplit(_) => "unknown_split",
            CliError::Write { .. } => "io",
            CliError::Serve(_) => "serve_failed",
        }
    }
}

fn print_json<T: Serialize>(value: &T) {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value).expect("stdout");
    writeln!(out).expect("stdout");
}

fn find<'a>(data: &'a Dataset, id: &str) -> Result<&'a Sample, CliError> {
    data.samples.iter().find(|s| s.id == id).ok_or_else(|| CliError::UnknownSample(id.to_string()))
}

#[derive(Serialize)]
struct GenerateSummary<'a> {
    out: &'a Path,
    seed: u64,
    setting: Setting,
    splits: Vec<(String, usize)>,
    checksum: String,
}

fn generate(args: GenerateArgs) -> Result<(), CliError> {
    let mut cfg = GeneratorConfig::default().with_seed(args.seed).with_setting(args.setting);
    cfg.splits =
        if args.splits.is_empty() { vec![SplitSize { name: "test".into(), size: args.size }] } else { args.splits };
    cfg.view_mode = match args.views {
        ViewsArg::Exhaustive => ViewMode::Exhaustive,
        ViewsArg::Sampled => ViewMode::Sampled,
    };
    let samples = generate_dataset(&cfg).map_err(|e| CliError::Generate(e.to_string()))?;
    let manifest = write_dataset(&samples, &cfg, &args.out)?;
    print_json(&GenerateSummary {
        out: &args.out,
        seed: cfg.seed,
        setting: cfg.setting,
        splits: manifest.splits.iter().map(|s| (s.name.clone(), s.records)).collect(),
        checksum: manifest.checksum,
    });
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), CliError> {
    if let Some(jobs) = args.jobs {
        // only fails if a pool already exists, in which case that pool is used
        let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build_global();
    }
    let data = read_dataset(&args.data.data)?;
    let predictions = read_predictions(&args.pred)?;
    let report = evaluate_predictions(&data.by_id(), &predictions).map_err(|e| CliError::Evaluate(e.to_string()))?;

    let analysis = if args.order_analysis {
        let scores: Vec<(String, MultiScore)> = report.scores.iter().map(|s| (s.id.clone(), s.score)).collect();
        let samples: Vec<Sample> =
            data.samples.iter().filter(|s| s.setting != Setting::View || s.view == View::Center).cloned().collect();
        Some(
            order_analysis(&samples, Some(&scores), args.trials, args.order_seed)
                .map_err(|e| CliError::Evaluate(e.to_string()))?,
        )
    } else {
        None
    };

    if args.json {
        match analysis {
            None => println!("{}", report.to_json()),
            Some(a) => {
                let body = serde_json::json!({ "evaluation": report, "order_analysis": a });
                println!("{}", serde_json::to_string(&body).expect("report serializes"));
            }
        }
        return Ok(());
    }

    let r = &report.report;
    println!("{:<8} {:>8} {:>8} {:>8} {:>8} {:>8}", "length", "samples", "AD", "AND", "Acc", "LAcc");
    for g in &r.by_length {
        let m = &g.metrics;
        println!("{:<8} {:>8} {:>8.4} {:>8.4} {:>8.4} {:>8.4}", g.length, m.samples, m.ad, m.and, m.acc, m.lacc);
    }
    println!("{:<8} {:>8} {:>8.4} {:>8.4} {:>8.4} {:>8.4}", "all", r.samples, r.ad, r.and, r.acc, r.lacc);
    println!("EO {:.4}", r.eo);
    if let Some(a) = analysis {
        println!("order-sensitive samples: {} of {} ({:.2}%)", a.order_sensitive, a.samples, 100.0 * a.fraction);
        match a.random_order_eo {
            Some(eo) => println!("random-order EO over {} trials (seed {}): {eo:.4}", a.trials, a.seed),
            None => println!("random-order EO: no order-sensitive samples"),
        }
        if let Some(p) = a.predictions {
            println!("predictions on the subset: Acc {:.4} LAcc {:.4} EO {:.4}", p.acc, p.lacc, p.eo);
        }
    }
    Ok(())
}

fn stats(args: StatsArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.data.data)?;
    let report = match &args.split {
        None => stats_report(&data.samples),
        Some(name) => {
            if !data.manifest.splits.iter().any(|s| &s.name == name) {
                return Err(CliError::UnknownSplit(name.clone()));
            }
            let members: Vec<Sample> = data.split(name).into_iter().cloned().collect();
            stats_report(&members)
        }
    };
    print_json(&report);
    Ok(())
}

fn render(args: RenderArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.sample.data.data)?;
    let sample = find(&data, &args.sample.id)?;
    let (scene, default_view) = match args.scene {
        SceneArg::Initial => (&sample.initial, View::Center),
        SceneArg::Final => (&sample.final_scene, sample.view),
    };
    let svg = render_schematic(scene, args.view.unwrap_or(default_view));
    std::fs::write(&args.out, svg).map_err(|source| CliError::Write { path: args.out.clone(), source })
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    id: &'a str,
    transformations: tvr_core::Transformation,
    text: String,
    score: MultiScore,
}

fn solve_cmd(args: SampleArgs) -> Result<(), CliError> {
    let data = read_dataset(&args.data.data)?;
    let sample = find(&data, &args.id)?;
    let answer = solve(&sample.initial, &sample.final_scene).map_err(|e| CliError::Evaluate(e.to_string()))?;
    let score = tvr_core::eval_multi(&answer, sample);
    print_json(&SolveOutput { id: &sample.id, text: answer.to_string(), transformations: answer, score });
    Ok(())
}

fn serve(args: ServeArgs) -> Result<(), CliError> {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::try_from_default_env().unwrap_or_else(|_| "info".into()))
        .with_writer(std::io::stderr)
        .init();
    let state = tvr_service::AppState::load(&args.data.data, args.sessions.as_deref(), args.trusted)
        .map_err(|e| CliError::Serve(e.to_string()))?;
    let runtime = tokio::runtime::Runtime::new().map_err(|e| CliError::Serve(e.to_string()))?;
    runtime.block_on(tvr_service::serve(args.addr, Arc::new(state))).map_err(|e| CliError::Serve(e.to_string()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Generate(a) => generate(a),
        Command::Evaluate(a) => evaluate(a),
        Command::Stats(a) => stats(a),
        Command::Render(a) => render(a),
        Command::Solve(a) => solve_cmd(a),
        Command::Serve(a) => serve(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            let body = serde_json::json!({ "code": e.code(), "message": e.to_string() });
            eprintln!("{body}");
            ExitCode::from(1)
        }
    }
}
