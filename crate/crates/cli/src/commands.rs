//! The four subcommands. Each loads and validates all inputs, computes every
//! output in memory, and only then writes files, so failures leave no
//! partial outputs (except the partial trajectory on executor timeout).

use std::fs;
use std::path::{Path, PathBuf};

use arcshot_core::pipeline::{plan_shot_with, PlanOptions, PlanReport};
use arcshot_core::{
    find_discontinuities, follow, generate_arc, ArcShotSpec, Error as PlanError, SimState, Tree, Vec3, World,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bench::run_bench;
use crate::error::CliError;
use crate::files::{self, BenchFile, ConfigFile, PathFile, ShotFile, WorldFile, SCHEMA_VERSION};
use crate::render::{bench_chart_svg, scene_svg, Scene};

/// What a successful command did, for text or machine output.
#[derive(Debug, Clone, PartialEq)]
pub struct Summary {
    pub lines: Vec<String>,
    pub json: Value,
}

/// Short description of the machine durations were measured on.
pub fn host_description() -> String {
    let cpu = fs::read_to_string("/proc/cpuinfo")
        .ok()
        .and_then(|s| {
            s.lines()
                .find(|l| l.starts_with("model name"))
                .and_then(|l| l.split(':').nth(1))
                .map(|m| m.trim().to_string())
        })
        .unwrap_or_else(|| "unknown cpu".into());
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    format!(
        "{}-{}, {cpu}, {threads} hardware threads",
        std::env::consts::OS,
        std::env::consts::ARCH
    )
}

fn load_world(path: &Path) -> Result<World, CliError> {
    files::read::<WorldFile>(path)?.into_world()
}

fn load_shot(path: &Path, world: &World) -> Result<ArcShotSpec, CliError> {
    files::read::<ShotFile>(path)?.into_spec(world)
}

/// Writes `(name, contents)` pairs into `dir`.
fn write_all(dir: &Path, outputs: &[(&str, String)]) -> Result<Vec<PathBuf>, CliError> {
    let io = |p: &Path, e: std::io::Error| CliError::Io {
        path: p.display().to_string(),
        message: e.to_string(),
    };
    fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
    let mut written = Vec::with_capacity(outputs.len());
    for (name, text) in outputs {
        let p = dir.join(name);
        fs::write(&p, text).map_err(|e| io(&p, e))?;
        written.push(p);
    }
    Ok(written)
}

fn listing(written: &[PathBuf]) -> Vec<String> {
    written.iter().map(|p| format!("wrote {}", p.display())).collect()
}

fn names(written: &[PathBuf]) -> Value {
    json!(written.iter().map(|p| p.display().to_string()).collect::<Vec<_>>())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpanRecord {
    pub entry_index: usize,
    pub exit_index: usize,
    pub blocked_runs: Vec<(usize, usize)>,
}

/// Deterministic plan report file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportFile {
    pub version: u32,
    pub report: PlanReport,
    /// Spans on the desired arc.
    pub discontinuities: Vec<SpanRecord>,
    /// Where each repaired span sits in the final path.
    pub final_spans: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TimingFile {
    pub version: u32,
    pub host: String,
    pub total_s: f64,
    pub local_s: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreesFile {
    pub version: u32,
    pub trees: Vec<Tree>,
}

#[derive(Debug, Clone)]
pub struct PlanArgs {
    pub world: PathBuf,
    pub shot: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub overlay_tree: bool,
}

pub fn plan(a: &PlanArgs) -> Result<Summary, CliError> {
    let world = load_world(&a.world)?;
    let spec = load_shot(&a.shot, &world)?;
    let cfg = ConfigFile::load(a.config.as_deref())?;
    let mut params = cfg.rrt;
    if let Some(seed) = a.seed {
        params.seed = seed;
    }
    let opts = PlanOptions {
        margin: cfg.margin,
        validation_step: cfg.validation_step,
    };
    let r = plan_shot_with(&world, &cfg.quad, &spec, &params, &opts)?;

    let overlay = a.overlay_tree || cfg.render.overlay_tree;
    let spans: Vec<(usize, usize)> = r.discontinuities.iter().map(|d| (d.entry_index, d.exit_index)).collect();
    let scene = Scene {
        desired: Some(&r.desired_path),
        spans: &spans,
        trees: if overlay { &r.trees } else { &[] },
        final_path: Some(&r.final_path),
        ..Scene::new(&world, &cfg.quad, cfg.render.scale)
    };
    let report = ReportFile {
        version: SCHEMA_VERSION,
        report: r.report.clone(),
        discontinuities: r
            .discontinuities
            .iter()
            .map(|d| SpanRecord {
                entry_index: d.entry_index,
                exit_index: d.exit_index,
                blocked_runs: d.blocked_runs.clone(),
            })
            .collect(),
        final_spans: r.final_spans.clone(),
    };
    let timing = TimingFile {
        version: SCHEMA_VERSION,
        host: host_description(),
        total_s: r.timing.total.as_secs_f64(),
        local_s: r.timing.local.iter().map(|d| d.as_secs_f64()).collect(),
    };
    let mut outputs = vec![
        ("path.json", files::to_json(&PathFile::from_path(&r.final_path))),
        ("report.json", files::to_json(&report)),
        ("timing.json", files::to_json(&timing)),
        ("plan.svg", scene_svg(&scene)),
    ];
    if overlay {
        outputs.push((
            "trees.json",
            files::to_json(&TreesFile {
                version: SCHEMA_VERSION,
                trees: r.trees.clone(),
            }),
        ));
    }
    let written = write_all(&a.out, &outputs)?;

    let mut lines = vec![format!(
        "planned {} poses, {} discontinuities, expansion level {}, {} tree nodes, {:.3} s",
        r.final_path.len(),
        r.discontinuities.len(),
        r.report.expansion_level(),
        r.report.totals.node_count,
        timing.total_s
    )];
    lines.extend(listing(&written));
    Ok(Summary {
        lines,
        json: json!({
            "status": "ok",
            "poses": r.final_path.len(),
            "discontinuities": r.discontinuities.len(),
            "expansion_level": r.report.expansion_level(),
            "node_count": r.report.totals.node_count,
            "outputs": names(&written),
        }),
    })
}

#[derive(Debug, Clone)]
pub struct ExecuteArgs {
    pub path: PathBuf,
    pub world: PathBuf,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

/// Start state for execution: on the ground (world floor) below the first
/// pose, already facing along its yaw.
pub fn ground_start(world: &World, first: &arcshot_core::Pose4) -> SimState {
    SimState {
        position: Vec3::new(first.position.x, first.position.y, world.bounds.min.z),
        yaw: first.yaw,
        time: 0.0,
    }
}

pub fn execute(a: &ExecuteArgs) -> Result<Summary, CliError> {
    let path = files::read::<PathFile>(&a.path)?.into_path()?;
    let world = load_world(&a.world)?;
    let cfg = ConfigFile::load(a.config.as_deref())?;
    let start = ground_start(&world, &path.poses[0]);

    let (log, failure) = match follow(&path, start, &cfg.follow, &cfg.quad) {
        Ok(log) => (log, None),
        Err(PlanError::TimeoutExceeded { max_time, log }) => {
            let partial = log.clone();
            (partial, Some(PlanError::TimeoutExceeded { max_time, log }))
        }
        Err(e) => return Err(e.into()),
    };
    let scene = Scene {
        final_path: Some(&path),
        executed: Some(&log),
        ..Scene::new(&world, &cfg.quad, cfg.render.scale)
    };
    let written = write_all(
        &a.out,
        &[
            ("trajectory.json", files::to_json(&PathFile::from_log(&log))),
            ("execute.svg", scene_svg(&scene)),
        ],
    )?;
    if let Some(e) = failure {
        return Err(e.into());
    }
    let end = log.last().copied().unwrap_or(start);
    let mut lines = vec![format!(
        "followed {} waypoints in {:.2} s ({} states)",
        path.len(),
        end.time,
        log.len()
    )];
    lines.extend(listing(&written));
    Ok(Summary {
        lines,
        json: json!({
            "status": "ok",
            "states": log.len(),
            "duration_s": end.time,
            "outputs": names(&written),
        }),
    })
}

#[derive(Debug, Clone)]
pub struct BenchArgs {
    pub world: PathBuf,
    pub shot: PathBuf,
    pub bench: PathBuf,
    pub config: Option<PathBuf>,
    pub seed: Option<u64>,
    pub out: PathBuf,
}

pub fn bench(a: &BenchArgs) -> Result<Summary, CliError> {
    let world = load_world(&a.world)?;
    let spec = load_shot(&a.shot, &world)?;
    let bench: BenchFile = files::read(&a.bench)?;
    bench.validate()?;
    let cfg = ConfigFile::load(a.config.as_deref())?;
    let seed = a.seed.unwrap_or(cfg.rrt.seed);

    let outcome = run_bench(&world, &spec, &cfg, &bench, seed)?;
    let host = host_description();
    let table = outcome.table(&host);
    let written = write_all(
        &a.out,
        &[
            ("bench.json", files::to_json(&outcome.report(&host, seed))),
            ("bench.txt", table.clone()),
            ("bench.svg", bench_chart_svg(&outcome.chart_points(), &host)),
        ],
    )?;
    let mut lines: Vec<String> = table.lines().map(str::to_string).collect();
    lines.extend(listing(&written));
    Ok(Summary {
        lines,
        json: json!({
            "status": "ok",
            "rows": outcome.rows,
            "outputs": names(&written),
        }),
    })
}

#[derive(Debug, Clone)]
pub struct RenderArgs {
    pub world: PathBuf,
    pub shot: Option<PathBuf>,
    pub path: Option<PathBuf>,
    pub trajectory: Option<PathBuf>,
    pub tree: Option<PathBuf>,
    pub config: Option<PathBuf>,
    pub out: PathBuf,
}

pub fn render(a: &RenderArgs) -> Result<Summary, CliError> {
    let world = load_world(&a.world)?;
    let cfg = ConfigFile::load(a.config.as_deref())?;
    let desired = match &a.shot {
        Some(p) => Some(generate_arc(&load_shot(p, &world)?)?),
        None => None,
    };
    // A shot whose endpoints are blocked still renders, just without spans.
    let spans: Vec<(usize, usize)> = desired
        .as_ref()
        .and_then(|d| find_discontinuities(d, &world, &cfg.quad, cfg.margin).ok())
        .unwrap_or_default()
        .iter()
        .map(|d| (d.entry_index, d.exit_index))
        .collect();
    let final_path = match &a.path {
        Some(p) => Some(files::read::<PathFile>(p)?.into_path()?),
        None => None,
    };
    let executed = match &a.trajectory {
        Some(p) => Some(files::read::<PathFile>(p)?.into_log()?),
        None => None,
    };
    let trees = match &a.tree {
        Some(p) => files::read::<TreesFile>(p)?.trees,
        None => Vec::new(),
    };
    let scene = Scene {
        desired: desired.as_ref(),
        spans: &spans,
        trees: &trees,
        final_path: final_path.as_ref(),
        executed: executed.as_deref(),
        ..Scene::new(&world, &cfg.quad, cfg.render.scale)
    };
    let written = write_all(&a.out, &[("render.svg", scene_svg(&scene))])?;
    Ok(Summary {
        lines: listing(&written),
        json: json!({ "status": "ok", "outputs": names(&written) }),
    })
}
