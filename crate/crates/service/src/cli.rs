//! Command line entry points: `analyze`, `serve` and `export`.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use gesturelens::export::{export, ExportKind};
use gesturelens::ingest::{load_embeddings, parse_pose_dir, parse_pose_frames, parse_transcript, PoseParseOptions};
use gesturelens::{analyze, AnalysisConfig, AnalysisInputs, PhraseSource};
use serde::Serialize;

use crate::store::{publish_bundle, Store, VideoMeta};

#[derive(Debug, Parser)]
#[command(name = "gesturelens", version, about = "Co-speech gesture analysis for presentation videos")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Analyze one video's pose and transcript into a bundle.
    Analyze(AnalyzeArgs),
    /// Serve the HTTP API over a data root.
    Serve(ServeArgs),
    /// Export a matrix, heatmap or transcript table from an analyzed video.
    Export(ExportArgs),
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    /// Pose document, or a directory of per-frame keypoint files.
    #[arg(long)]
    pub pose: PathBuf,
    #[arg(long)]
    pub transcript: PathBuf,
    /// Video directory to write into, e.g. `<data-root>/videos/<id>`.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Pre-extracted phrase annotations.
    #[arg(long, conflicts_with = "tag_fallback")]
    pub phrases: Option<PathBuf>,
    /// Word vectors in GloVe text format.
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    /// Tag untagged transcripts with the built-in closed-class tagger.
    #[arg(long)]
    pub tag_fallback: bool,
    /// Overrides the configured t-SNE seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Frame rate for pose frames without timestamps.
    #[arg(long)]
    pub fps: Option<f64>,
    #[arg(long)]
    pub title: Option<String>,
    /// Video file served for playback.
    #[arg(long)]
    pub media: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct ServeArgs {
    #[arg(long, env = "GESTURELENS_DATA_ROOT")]
    pub data_root: PathBuf,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: SocketAddr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ExportWhat {
    Matrix,
    Heatmap,
    TranscriptCsv,
}

impl From<ExportWhat> for ExportKind {
    fn from(w: ExportWhat) -> Self {
        match w {
            ExportWhat::Matrix => ExportKind::Matrix,
            ExportWhat::Heatmap => ExportKind::Heatmap,
            ExportWhat::TranscriptCsv => ExportKind::TranscriptCsv,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[arg(long, env = "GESTURELENS_DATA_ROOT")]
    pub data_root: PathBuf,
    #[arg(long)]
    pub video: String,
    #[arg(long, value_enum)]
    pub what: ExportWhat,
    /// Output file; `-` writes to stdout.
    #[arg(long, default_value = "-")]
    pub out: PathBuf,
}

/// A failure reported as one JSON object on stderr.
#[derive(Debug, Clone, PartialEq, Serialize, thiserror::Error)]
#[error("{error}: {message}")]
pub struct CliError {
    pub error: String,
    pub message: String,
}

impl CliError {
    fn new(kind: &str, message: impl Into<String>) -> Self {
        CliError { error: kind.to_string(), message: message.into() }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("error serializes")
    }
}

impl From<gesturelens::Error> for CliError {
    fn from(e: gesturelens::Error) -> Self {
        CliError::new(e.kind(), e.to_string())
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeSummary {
    pub video_id: String,
    pub bundle: PathBuf,
    pub input_hash: String,
    pub duration: f64,
    pub frames: usize,
    pub words: usize,
    pub phrases: usize,
    pub segments: usize,
    pub clamp_events: usize,
    pub skipped_frames: usize,
    pub excluded_segments: usize,
    pub oov_phrases: usize,
}

fn read_input(path: &Path, what: &str) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::new("ConfigError", format!("cannot read {what} {}: {e}", path.display())))
}

/// Run the pipeline and publish the bundle into `args.out`.
pub fn run_analyze(args: &AnalyzeArgs) -> Result<AnalyzeSummary, CliError> {
    let mut config = match &args.config {
        Some(path) => AnalysisConfig::load(path)?,
        None => AnalysisConfig::default(),
    };
    if let Some(seed) = args.seed {
        config.tsne_seed = seed;
    }
    if let Some(fps) = args.fps {
        config.fps = Some(fps);
    }
    config.validate()?;

    let options = PoseParseOptions { fps_hint: config.fps, frame_size: None };
    let track = if args.pose.is_dir() {
        parse_pose_dir(&args.pose, &options)?
    } else {
        parse_pose_frames(&read_input(&args.pose, "pose file")?, &options)?
    };
    let words = parse_transcript(&read_input(&args.transcript, "transcript")?)?;
    let phrases = match (&args.phrases, args.tag_fallback) {
        (Some(path), _) => PhraseSource::Annotations(read_input(path, "phrase annotations")?),
        (None, true) => PhraseSource::FallbackTagger,
        (None, false) => PhraseSource::Tags,
    };
    let embeddings = match &args.embeddings {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::new("ConfigError", format!("cannot read embeddings {}: {e}", path.display())))?;
            Some(load_embeddings(BufReader::new(file))?)
        }
        None => None,
    };
    let inputs = AnalysisInputs { track, words, phrases, embeddings };
    let bundle = analyze(&inputs, &config)?;

    let storage = |e: std::io::Error| CliError::new("StorageError", format!("{}: {e}", args.out.display()));
    let path = publish_bundle(&args.out, &bundle.input_hash, &bundle.to_json()).map_err(storage)?;
    let video_id = args
        .out
        .file_name()
        .and_then(|n| n.to_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::new("ConfigError", "output directory needs a name to serve as the video id"))?;
    let meta_path = args.out.join("video.json");
    let existing: Option<VideoMeta> = std::fs::read(&meta_path).ok().and_then(|b| serde_json::from_slice(&b).ok());
    let media = match &args.media {
        Some(m) => Some(std::path::absolute(m).map_err(storage)?),
        None => existing.as_ref().and_then(|m| m.media.clone()),
    };
    let meta = VideoMeta {
        id: video_id.clone(),
        title: args
            .title
            .clone()
            .or_else(|| existing.as_ref().map(|m| m.title.clone()))
            .unwrap_or_else(|| video_id.clone()),
        media,
    };
    if existing.as_ref() != Some(&meta) {
        let json = serde_json::to_vec_pretty(&meta).expect("meta serializes");
        crate::store::write_atomic(&meta_path, &json).map_err(storage)?;
    }

    let d = &bundle.diagnostics;
    Ok(AnalyzeSummary {
        video_id,
        bundle: path,
        input_hash: bundle.input_hash.clone(),
        duration: bundle.duration,
        frames: d.frame_count,
        words: bundle.words.len(),
        phrases: bundle.phrases.len(),
        segments: bundle.segments.len(),
        clamp_events: d.clamp_events,
        skipped_frames: d.skipped_frames.len(),
        excluded_segments: d.excluded_segments.len(),
        oov_phrases: d.oov_phrases.len(),
    })
}

pub fn run_export(args: &ExportArgs) -> Result<(), CliError> {
    let store = Store::new(&args.data_root);
    let bundle = store.bundle(&args.video).map_err(|e| CliError::new(e.kind(), e.to_string()))?;
    let io = |e: std::io::Error| CliError::new("StorageError", format!("{}: {e}", args.out.display()));
    if args.out.as_os_str() == "-" {
        let stdout = std::io::stdout();
        let mut out = stdout.lock();
        export(&bundle, args.what.into(), &mut out)?;
        out.flush().map_err(io)?;
    } else {
        let mut out = BufWriter::new(File::create(&args.out).map_err(io)?);
        export(&bundle, args.what.into(), &mut out)?;
        out.flush().map_err(io)?;
    }
    Ok(())
}

pub async fn run_serve(args: &ServeArgs) -> Result<(), CliError> {
    if !args.data_root.is_dir() {
        return Err(CliError::new(
            "StorageError",
            format!("data root {} is not a directory", args.data_root.display()),
        ));
    }
    let app = crate::api::router(Arc::new(Store::new(&args.data_root)));
    let listener = tokio::net::TcpListener::bind(args.bind)
        .await
        .map_err(|e| CliError::new("StartupError", format!("cannot bind {}: {e}", args.bind)))?;
    tracing::info!(address = %args.bind, root = %args.data_root.display(), "serving");
    axum::serve(listener, app)
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
        .map_err(|e| CliError::new("StorageError", e.to_string()))
}

/// Parse arguments, run, and return the process exit code.
pub fn main_with(cli: Cli) -> i32 {
    let result = match &cli.command {
        Command::Analyze(args) => run_analyze(args).map(|summary| {
            println!("{}", serde_json::to_string_pretty(&summary).expect("summary serializes"));
        }),
        Command::Export(args) => run_export(args),
        Command::Serve(args) => tokio::runtime::Runtime::new()
            .map_err(|e| CliError::new("StartupError", e.to_string()))
            .and_then(|rt| rt.block_on(run_serve(args))),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", e.to_json());
            1
        }
    }
}
