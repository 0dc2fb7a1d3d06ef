use std::fmt;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use goalie_core::correct::{correct, CorrectionConfig};
use goalie_core::document::{parse_sequence, sequence_to_json, SequenceDocument};
use goalie_core::ingest::DEFAULT_MIN_CONFIDENCE;
use goalie_core::optimizer::OptimizerConfig;
use goalie_core::render::{render_sequence, Color, RenderConfig};
use goalie_core::{FrameDims, JointId, Label, Sequence};
use goalie_service::import::{import_session, ImportOptions};
use goalie_service::store::Store;
use goalie_service::ServiceError;

#[derive(Parser)]
#[command(name = "goalie", version, about = "Correct a goalkeeper's keyframed motion so the ball is blocked")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Create an annotation session from detection documents and frame images.
    Import(ImportArgs),
    /// Run the correction on a sequence document.
    Correct(CorrectArgs),
    /// Render SVG frames and an animated GIF.
    Render(RenderArgs),
    /// Serve the annotation API.
    Serve(ServeArgs),
    /// Check a sequence document against the schema.
    Validate { input: PathBuf },
}

#[derive(Args)]
struct ImportArgs {
    /// Directory with exactly ten per-frame keypoint documents (*.json).
    #[arg(long)]
    detections: PathBuf,
    /// Directory with the ten matching frame images.
    #[arg(long)]
    images: PathBuf,
    #[arg(long)]
    width: u32,
    #[arg(long)]
    height: u32,
    #[arg(long, default_value = "goalie-data")]
    data_dir: PathBuf,
    #[arg(long)]
    source_id: Option<String>,
    #[arg(long, default_value = "hit", value_parser = parse_label)]
    label: Label,
    /// Frame count of the source clip, for keyframe times.
    #[arg(long, default_value_t = 10)]
    total_frames: usize,
    #[arg(long, default_value_t = 30.0)]
    fps: f64,
    #[arg(long, default_value_t = DEFAULT_MIN_CONFIDENCE)]
    min_confidence: f64,
}

#[derive(Args)]
struct CorrectArgs {
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Report path; defaults to <out>.report.json.
    #[arg(long)]
    report: Option<PathBuf>,
    #[arg(long)]
    goal_frame: Option<usize>,
    #[arg(long, value_parser = parse_joint)]
    blocking_joint: Option<JointId>,
    #[arg(long, default_value_t = 10)]
    iterations: usize,
    #[arg(long, default_value_t = 1e-6)]
    tolerance: f64,
    #[arg(long)]
    interpolate_ball: bool,
}

#[derive(Args)]
struct RenderArgs {
    input: PathBuf,
    /// Corrected sequence drawn over the original.
    #[arg(long)]
    corrected: Option<PathBuf>,
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 2500)]
    width: u32,
    #[arg(long, default_value_t = 1200)]
    height: u32,
    #[arg(long, default_value_t = 1.0)]
    magnification: f64,
    #[arg(long, default_value_t = 5.0)]
    goalpost_offset: f64,
    #[arg(long, default_value_t = 5.0)]
    goalpost_height: f64,
    /// Render the last keyframe too.
    #[arg(long)]
    no_skip_last: bool,
    #[arg(long, default_value = "white", value_parser = parse_color)]
    ball_color: Color,
    #[arg(long, default_value_t = 200)]
    frame_interval_ms: u32,
    #[arg(long, default_value_t = 0.5)]
    raster_scale: f64,
}

#[derive(Args)]
struct ServeArgs {
    #[arg(long, default_value_t = 8080)]
    port: u16,
    #[arg(long, default_value = "127.0.0.1")]
    host: String,
    #[arg(long, default_value = "goalie-data")]
    data_dir: PathBuf,
}

fn parse_label(s: &str) -> Result<Label, String> {
    serde_json::from_value(serde_json::Value::String(s.to_string())).map_err(|_| format!("expected hit or miss, got `{s}`"))
}

fn parse_joint(s: &str) -> Result<JointId, String> {
    s.parse().map_err(|e: goalie_core::Error| e.to_string())
}

fn parse_color(s: &str) -> Result<Color, String> {
    s.parse().map_err(|e: goalie_core::Error| e.to_string())
}

/// A failure reported as `error[code]: message` on one line.
#[derive(Debug)]
struct Failure {
    code: &'static str,
    message: String,
}

impl Failure {
    fn new(code: &'static str, message: impl fmt::Display) -> Failure {
        Failure {
            code,
            message: message.to_string().replace('\n', " "),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "error[{}]: {}", self.code, self.message)
    }
}

impl From<goalie_core::Error> for Failure {
    fn from(e: goalie_core::Error) -> Self {
        let code = match e {
            goalie_core::Error::Io(_) => "io_error",
            goalie_core::Error::InvalidConfig(_) => "invalid_argument",
            goalie_core::Error::InvalidGoalIndex { .. } => "invalid_argument",
            _ => "correction_failed",
        };
        Failure::new(code, e)
    }
}

impl From<ServiceError> for Failure {
    fn from(e: ServiceError) -> Self {
        Failure::new(e.code(), e)
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path).map_err(|e| Failure::new("io_error", format!("{}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), Failure> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Failure::new("io_error", format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, text).map_err(|e| Failure::new("io_error", format!("{}: {e}", path.display())))
}

fn load_sequence(path: &Path) -> Result<Sequence, Failure> {
    parse_sequence(&read(path)?).map_err(|e| Failure::new("invalid_document", format!("{}: {e}", path.display())))
}

fn run_import(a: ImportArgs) -> Result<(), Failure> {
    let dims = FrameDims::new(a.width, a.height)?;
    let opts = ImportOptions {
        source_id: a.source_id,
        label: a.label,
        min_confidence: a.min_confidence,
        total_frames: a.total_frames,
        fps: a.fps,
    };
    let store = Store::open(&a.data_dir)?;
    let plan = import_session(&goalie_service::api::new_session_id(), &a.detections, &a.images, dims, &opts)?;
    store.create(&plan.session, &plan.images)?;
    let summary = serde_json::json!({
        "session_id": plan.session.session_id,
        "source_id": plan.session.source_id,
        "frames": plan.session.frames.iter().map(|f| f.state).collect::<Vec<_>>(),
    });
    println!("{summary}");
    Ok(())
}

fn report_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "corrected".into());
    out.with_file_name(format!("{stem}.report.json"))
}

fn run_correct(a: CorrectArgs) -> Result<(), Failure> {
    let seq = load_sequence(&a.input)?;
    let cfg = CorrectionConfig {
        goal_frame: a.goal_frame,
        blocking_joint: a.blocking_joint,
        optimizer: OptimizerConfig {
            iterations: a.iterations,
            convergence_tol: a.tolerance,
            interpolate_ball: a.interpolate_ball,
        },
        ..Default::default()
    };
    let out = correct(&seq, &cfg)?;
    write(&a.out, &sequence_to_json(&out.sequence))?;
    let report = serde_json::to_string_pretty(&out.report).expect("report serializes");
    write(&a.report.unwrap_or_else(|| report_path(&a.out)), &(report + "\n"))?;
    let r = &out.report;
    println!(
        "{}: {} G={} joint={} mirrored={} iterations={} converged={}",
        r.source_id,
        serde_json::to_value(r.direction).expect("direction serializes").as_str().unwrap_or_default(),
        r.goal_index, r.blocking_joint, r.mirrored, r.iterations, r.converged
    );
    Ok(())
}

fn run_render(a: RenderArgs) -> Result<(), Failure> {
    let original = load_sequence(&a.input)?;
    let corrected = a.corrected.as_deref().map(load_sequence).transpose()?;
    let cfg = RenderConfig {
        window_width: a.width,
        window_height: a.height,
        magnification: a.magnification,
        goalpost_offset: a.goalpost_offset,
        goalpost_height: a.goalpost_height,
        skip_last_frame: !a.no_skip_last,
        ball_color: a.ball_color,
        frame_interval_ms: a.frame_interval_ms,
        raster_scale: a.raster_scale,
    };
    let out = render_sequence(&original, corrected.as_ref(), &cfg)?;
    let written = out.write_to_dir(&a.out_dir)?;
    println!("wrote {} files to {}", written.len(), a.out_dir.display());
    Ok(())
}

fn run_validate(input: &Path) -> Result<(), Failure> {
    let doc = SequenceDocument::from_json(&read(input)?)
        .and_then(|d| d.validate().map(|()| d))
        .map_err(|e| Failure::new("invalid_document", format!("{}: {e}", input.display())))?;
    println!("{}: ok ({} frames)", input.display(), doc.frames.len());
    Ok(())
}

fn run_serve(a: ServeArgs) -> Result<(), Failure> {
    let addr: SocketAddr = format!("{}:{}", a.host, a.port)
        .parse()
        .map_err(|e| Failure::new("invalid_argument", format!("bad address: {e}")))?;
    let rt = tokio::runtime::Runtime::new().map_err(|e| Failure::new("io_error", e))?;
    rt.block_on(goalie_service::serve(addr, a.data_dir))?;
    Ok(())
}

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(tracing_subscriber::EnvFilter::from_default_env())
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Import(a) => run_import(a),
        Command::Correct(a) => run_correct(a),
        Command::Render(a) => run_render(a),
        Command::Serve(a) => run_serve(a),
        Command::Validate { input } => run_validate(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            ExitCode::FAILURE
        }
    }
}
