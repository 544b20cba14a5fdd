//! Loop-count benchmark: repeated planning of one scenario per max_loops
//! value, summarised as duration and cost statistics.

use std::time::{Duration, Instant};

use arcshot_core::pipeline::{plan_path, PlanOptions};
use arcshot_core::{find_discontinuities, generate_arc, ArcShotSpec, Error as PlanError, Tree, World};
use serde::{Deserialize, Serialize};

use crate::error::CliError;
use crate::files::{BenchFile, ConfigFile, SCHEMA_VERSION};
use crate::render::ChartPoint;

/// One planning query of the benchmark.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub loops: usize,
    pub rep: usize,
    pub seed: u64,
    pub duration: Duration,
    /// Summed local-path cost; `None` when planning failed.
    pub cost: Option<f64>,
    pub expansion_level: Option<u32>,
    pub node_count: usize,
    /// Trees of the successful local attempts.
    pub trees: Vec<Tree>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub loops: usize,
    pub repetitions: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_duration_s: f64,
    pub min_duration_s: f64,
    pub max_duration_s: f64,
    /// Mean over successful repetitions.
    pub mean_cost: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct BenchOutcome {
    pub runs: Vec<BenchRun>,
    pub rows: Vec<BenchRow>,
}

/// Seed of repetition `rep`; repetitions of different loop counts share
/// seeds so rows compare the same random streams.
pub fn rep_seed(base: u64, rep: usize) -> u64 {
    base.wrapping_add(rep as u64)
}

/// Runs every (loops, rep) query sequentially so timings do not compete for
/// cores. Planner failures count against the success rate; other errors abort.
pub fn run_bench(
    world: &World,
    spec: &ArcShotSpec,
    cfg: &ConfigFile,
    bench: &BenchFile,
    seed: u64,
) -> Result<BenchOutcome, CliError> {
    let arc = generate_arc(spec)?;
    if find_discontinuities(&arc, world, &cfg.quad, cfg.margin)?.is_empty() {
        return Err(CliError::VacuousBench);
    }
    let opts = PlanOptions {
        margin: cfg.margin,
        validation_step: cfg.validation_step,
    };
    let mut runs = Vec::with_capacity(bench.loops.len() * bench.repetitions);
    for &loops in &bench.loops {
        for rep in 0..bench.repetitions {
            let params = arcshot_core::RrtParams {
                max_loops: loops,
                seed: rep_seed(seed, rep),
                ..cfg.rrt
            };
            let t0 = Instant::now();
            let result = plan_path(world, &cfg.quad, arc.clone(), spec.target, &params, &opts);
            let duration = t0.elapsed();
            let run = match result {
                Ok(r) => BenchRun {
                    loops,
                    rep,
                    seed: params.seed,
                    duration,
                    cost: Some(r.report.local_plans.iter().map(|s| s.cost).sum()),
                    expansion_level: Some(r.report.expansion_level()),
                    node_count: r.report.totals.node_count,
                    trees: r.trees,
                },
                Err(PlanError::LocalPlanFailed { .. } | PlanError::ValidationFailed { .. }) => BenchRun {
                    loops,
                    rep,
                    seed: params.seed,
                    duration,
                    cost: None,
                    expansion_level: None,
                    node_count: 0,
                    trees: Vec::new(),
                },
                Err(e) => return Err(e.into()),
            };
            runs.push(run);
        }
    }
    let rows = bench.loops.iter().map(|&l| summarize(l, &runs)).collect();
    Ok(BenchOutcome { runs, rows })
}

fn summarize(loops: usize, runs: &[BenchRun]) -> BenchRow {
    let rs: Vec<&BenchRun> = runs.iter().filter(|r| r.loops == loops).collect();
    let secs: Vec<f64> = rs.iter().map(|r| r.duration.as_secs_f64()).collect();
    let costs: Vec<f64> = rs.iter().filter_map(|r| r.cost).collect();
    let n = rs.len();
    BenchRow {
        loops,
        repetitions: n,
        successes: costs.len(),
        success_rate: costs.len() as f64 / n as f64,
        mean_duration_s: secs.iter().sum::<f64>() / n as f64,
        min_duration_s: secs.iter().copied().fold(f64::INFINITY, f64::min),
        max_duration_s: secs.iter().copied().fold(0.0, f64::max),
        mean_cost: (!costs.is_empty()).then(|| costs.iter().sum::<f64>() / costs.len() as f64),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunRecord {
    pub loops: usize,
    pub rep: usize,
    pub seed: u64,
    pub duration_s: f64,
    pub success: bool,
    pub cost: Option<f64>,
    pub expansion_level: Option<u32>,
    pub node_count: usize,
}

/// Machine-readable bench table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BenchReport {
    pub version: u32,
    /// Durations are wall-clock on this host and only comparable within it.
    pub host: String,
    pub seed: u64,
    pub rows: Vec<BenchRow>,
    pub runs: Vec<RunRecord>,
}

impl BenchOutcome {
    pub fn report(&self, host: &str, seed: u64) -> BenchReport {
        BenchReport {
            version: SCHEMA_VERSION,
            host: host.to_string(),
            seed,
            rows: self.rows.clone(),
            runs: self
                .runs
                .iter()
                .map(|r| RunRecord {
                    loops: r.loops,
                    rep: r.rep,
                    seed: r.seed,
                    duration_s: r.duration.as_secs_f64(),
                    success: r.cost.is_some(),
                    cost: r.cost,
                    expansion_level: r.expansion_level,
                    node_count: r.node_count,
                })
                .collect(),
        }
    }

    pub fn chart_points(&self) -> Vec<ChartPoint> {
        self.rows
            .iter()
            .map(|r| ChartPoint {
                loops: r.loops,
                mean: r.mean_duration_s,
                min: r.min_duration_s,
                max: r.max_duration_s,
            })
            .collect()
    }

    /// Human-readable table.
    pub fn table(&self, host: &str) -> String {
        let mut out = format!("# wall-clock durations on {host}; hardware-relative\n");
        out.push_str(&format!(
            "{:>9} {:>5} {:>12} {:>12} {:>12} {:>10} {:>8}\n",
            "max_loops", "reps", "mean_s", "min_s", "max_s", "mean_cost", "success"
        ));
        for r in &self.rows {
            let cost = r.mean_cost.map_or_else(|| "-".to_string(), |c| format!("{c:.4}"));
            out.push_str(&format!(
                "{:>9} {:>5} {:>12.6} {:>12.6} {:>12.6} {:>10} {:>7.1}%\n",
                r.loops,
                r.repetitions,
                r.mean_duration_s,
                r.min_duration_s,
                r.max_duration_s,
                cost,
                100.0 * r.success_rate
            ));
        }
        out
    }
}
