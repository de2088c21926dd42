//! `groundcheck` command line: verify plans, export navigation maps, score
//! predictions and completions, and audit batches.
//!
//! Exit status: 0 pass, 1 plan fails, 2 input or runtime error. Errors are
//! written to stderr as a single JSON object.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use groundcheck::audit::{load_manifest, run_audit};
use groundcheck::checks::{
    AnnotationResolver, DefaultResolver, FixtureProvider, FullSurfaceProvider,
};
use groundcheck::engine::{run_grounding, Backends, EngineError, VerificationConfig};
use groundcheck::io::{
    load_annotations, load_fixture_parts, load_plan, load_profile, load_scene, read_jsonl,
    render_navmap, render_regions, render_zone_mask, to_json_string, write_json, write_jsonl,
    IoError,
};
use groundcheck::metrics::{metrics_report, LabelRecord, MetricsError, PredictionRecord};
use groundcheck::navmap::{build_navmap, NavMapOptions};
use groundcheck::reward::{score_completions, CompletionRecord, DEFAULT_ADVANTAGE_EPSILON};

#[derive(Parser)]
#[command(
    name = "groundcheck",
    version,
    about = "Agent-aware geometric verification of action plans"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ground a plan in a scene for one agent and write the diagnostic report.
    Verify(VerifyArgs),
    /// Write the agent's navigation map as a PGM image.
    Navmap(NavmapArgs),
    /// Accuracy, false-positive rate, MCC, HSI, InGap and consistency.
    Metrics(MetricsArgs),
    /// Shaped rewards and per-task advantages for sampled completions.
    Reward(RewardArgs),
    /// Verify every (scene, plan, agent) triplet of a manifest.
    Audit(AuditArgs),
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    plan: PathBuf,
    /// Built-in profile name or profile JSON path; defaults to the plan's agent.
    #[arg(long)]
    agent: Option<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Directory for navmap, region and zone images and clearance boxes.
    #[arg(long)]
    debug_dir: Option<PathBuf>,
    /// Functional-part fixture file for interactable checks.
    #[arg(long)]
    parts: Option<PathBuf>,
    /// Per-category zone annotations.
    #[arg(long)]
    annotations: Option<PathBuf>,
    /// Verification config JSON; command-line flags override its seed.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    resolution: Option<usize>,
}

#[derive(Args)]
struct NavmapArgs {
    #[arg(long)]
    scene: PathBuf,
    #[arg(long)]
    agent: String,
    #[arg(long, default_value_t = groundcheck::navmap::DEFAULT_RESOLUTION)]
    resolution: usize,
    #[arg(long)]
    out: PathBuf,
    /// Write region labels as gray levels instead of the binary map.
    #[arg(long)]
    regions: bool,
}

#[derive(Args)]
struct MetricsArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    direct: Option<PathBuf>,
    #[arg(long)]
    decomposed: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct RewardArgs {
    #[arg(long)]
    labels: PathBuf,
    #[arg(long)]
    completions: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = DEFAULT_ADVANTAGE_EPSILON)]
    epsilon: f64,
}

#[derive(Args)]
struct AuditArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Defaults to the number of available cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Debug)]
struct CliError {
    kind: &'static str,
    message: String,
}

impl CliError {
    fn new(kind: &'static str, message: impl Into<String>) -> Self {
        Self {
            kind,
            message: message.into(),
        }
    }

    fn to_json(&self) -> Value {
        json!({"error": {"kind": self.kind, "message": self.message}})
    }
}

impl From<IoError> for CliError {
    fn from(e: IoError) -> Self {
        CliError::new(e.kind(), e.to_string())
    }
}

impl From<EngineError> for CliError {
    fn from(e: EngineError) -> Self {
        let kind = match e {
            EngineError::Plan(_) | EngineError::Profile(_) | EngineError::Config(_) => "schema",
            _ => "verification",
        };
        CliError::new(kind, e.to_string())
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::new("schema", e.to_string())
    }
}

type Outcome = Result<ExitCode, CliError>;

fn warn(message: &str) {
    eprintln!("{}", json!({"warning": message}));
}

fn verify(args: VerifyArgs) -> Outcome {
    let loaded = load_scene(&args.scene)?;
    for w in &loaded.warnings {
        warn(w);
    }
    let scene = loaded.scene;
    let plan = load_plan(&args.plan)?;
    let profile = load_profile(args.agent.as_deref().unwrap_or(&plan.agent))?;
    let parts: Option<FixtureProvider> =
        args.parts.as_deref().map(load_fixture_parts).transpose()?;
    let annotations: Option<AnnotationResolver> = args
        .annotations
        .as_deref()
        .map(load_annotations)
        .transpose()?;
    let backends = Backends {
        resolver: match &annotations {
            Some(a) => a,
            None => &DefaultResolver,
        },
        provider: match &parts {
            Some(p) => p,
            None => &FullSurfaceProvider,
        },
    };
    let mut cfg: VerificationConfig = match &args.config {
        Some(p) => groundcheck::io::read_json(p)?,
        None => VerificationConfig::default(),
    };
    cfg.seed = args.seed;
    if let Some(r) = args.resolution {
        cfg.resolution = r;
    }

    let run = run_grounding(&plan, &scene, &profile, &cfg, backends)?;
    write_json(&args.out, &run.report)?;

    if let Some(dir) = &args.debug_dir {
        write_file(&dir.join("navmap.pgm"), &render_navmap(&run.map))?;
        write_file(&dir.join("regions.pgm"), &render_regions(&run.map))?;
        let mut boxes = Vec::new();
        for (i, (t, step)) in run.trace.iter().zip(&run.report.steps).enumerate() {
            write_file(
                &dir.join(format!("step_{:02}_zones.pgm", i + 1)),
                &render_zone_mask(&run.map, &t.zones),
            )?;
            boxes.push(json!({
                "step": i + 1,
                "action": step.action,
                "object_id": step.object_id,
                "pose_before": t.pose_before,
                "pose_after": t.pose_after,
                "zones": t.zones,
                "clearance_boxes": t.clearance_boxes,
            }));
        }
        write_json(
            &dir.join("trace.json"),
            &json!({"initial_pose": run.initial_pose, "steps": boxes}),
        )?;
    }

    println!("{}", run.report.insight);
    Ok(if run.report.overall_success {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::new("io", format!("{}: {e}", dir.display())))?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::new("io", format!("{}: {e}", path.display())))
}

fn navmap(args: NavmapArgs) -> Outcome {
    let loaded = load_scene(&args.scene)?;
    for w in &loaded.warnings {
        warn(w);
    }
    let profile = load_profile(&args.agent)?;
    let options = NavMapOptions {
        resolution: args.resolution,
        ..Default::default()
    };
    let map = build_navmap(&loaded.scene, &profile, &options)
        .map_err(|e| CliError::new("verification", e.to_string()))?;
    let bytes = if args.regions {
        render_regions(&map)
    } else {
        render_navmap(&map)
    };
    write_file(&args.out, &bytes)?;
    println!(
        "{}",
        json!({
            "resolution": map.resolution(),
            "scale": map.scale(),
            "walkable_pixels": map.walkable_count(),
            "regions": map.labels().region_count(),
        })
    );
    Ok(ExitCode::SUCCESS)
}

/// Prediction files may omit the `mode` tag; it is implied by the flag.
fn read_predictions(path: &Path, mode: &str) -> Result<Vec<PredictionRecord>, CliError> {
    let raw: Vec<Value> = read_jsonl(path)?;
    raw.into_iter()
        .enumerate()
        .map(|(i, mut v)| {
            if let Some(obj) = v.as_object_mut() {
                obj.entry("mode").or_insert_with(|| json!(mode));
            }
            serde_json::from_value(v).map_err(|e| {
                CliError::new(
                    "schema",
                    format!("{}: record {}: {e}", path.display(), i + 1),
                )
            })
        })
        .collect()
}

fn metrics(args: MetricsArgs) -> Outcome {
    if args.direct.is_none() && args.decomposed.is_none() {
        return Err(CliError::new(
            "usage",
            "give --direct, --decomposed or both",
        ));
    }
    let labels: Vec<LabelRecord> = read_jsonl(&args.labels)?;
    let direct = args
        .direct
        .as_deref()
        .map(|p| read_predictions(p, "direct"))
        .transpose()?;
    let decomposed = args
        .decomposed
        .as_deref()
        .map(|p| read_predictions(p, "decomposed"))
        .transpose()?;
    let report = metrics_report(&labels, direct.as_deref(), decomposed.as_deref())?;
    write_json(&args.out, &report)?;
    print!("{}", to_json_string(&report));
    Ok(ExitCode::SUCCESS)
}

fn reward(args: RewardArgs) -> Outcome {
    let labels: Vec<LabelRecord> = read_jsonl(&args.labels)?;
    let completions: Vec<CompletionRecord> = read_jsonl(&args.completions)?;
    let records = score_completions(&labels, &completions, args.epsilon)?;
    write_jsonl(&args.out, &records)?;
    let mean = records.iter().map(|r| r.reward.total).sum::<f64>() / records.len().max(1) as f64;
    println!(
        "{}",
        json!({"completions": records.len(), "mean_reward": mean})
    );
    Ok(ExitCode::SUCCESS)
}

fn audit(args: AuditArgs) -> Outcome {
    let (jobs, cfg) = load_manifest(&args.manifest)?;
    let workers = args
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let summary =
        run_audit(&jobs, &cfg, workers).map_err(|e| CliError::new("usage", e.to_string()))?;
    write_json(&args.out, &summary)?;
    print!("{}", summary.table());
    let errors = summary.error_count();
    if errors > 0 {
        return Err(CliError::new(
            "verification",
            format!(
                "{errors} of {} jobs failed to run; see {}",
                summary.jobs,
                args.out.display()
            ),
        ));
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            eprintln!(
                "{}",
                CliError::new("usage", e.to_string().trim_end()).to_json()
            );
            return ExitCode::from(2);
        }
    };
    let result = match cli.command {
        Command::Verify(a) => verify(a),
        Command::Navmap(a) => navmap(a),
        Command::Metrics(a) => metrics(a),
        Command::Reward(a) => reward(a),
        Command::Audit(a) => audit(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(2)
        }
    }
}
