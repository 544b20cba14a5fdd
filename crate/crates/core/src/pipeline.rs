//! End-to-end shot planning: generate the desired arc, find blocked spans,
//! repair each with the local planner, splice, and validate.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::discontinuity::{find_discontinuities, Discontinuity, DEFAULT_MARGIN};
use crate::error::{Error, Result};
use crate::local_planner::{plan_local, LocalPath, RrtParams, Tree};
use crate::shot::{face_target, generate_arc, ArcShotSpec, GlobalPath, Pose4};
use crate::world::{is_free, segment_free, QuadModel, Vec3, World};

const SPLICE_TOLERANCE: f64 = 1e-6;

/// Per-discontinuity planning statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPlanStats {
    pub discontinuity: usize,
    pub entry_index: usize,
    pub exit_index: usize,
    pub node_count: usize,
    pub loops: usize,
    pub expansion_level: u32,
    pub cost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanTotals {
    pub discontinuities: usize,
    pub node_count: usize,
    pub loops: usize,
    pub final_length: f64,
    pub final_samples: usize,
}

/// Deterministic part of a plan report: identical inputs give identical
/// reports. Wall-clock durations live in [`PlanTiming`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub seed: u64,
    pub margin: usize,
    pub quad: QuadModel,
    pub params: RrtParams,
    pub local_plans: Vec<LocalPlanStats>,
    pub totals: PlanTotals,
}

impl PlanReport {
    /// Highest window expansion level any local plan needed.
    pub fn expansion_level(&self) -> u32 {
        self.local_plans
            .iter()
            .map(|s| s.expansion_level)
            .max()
            .unwrap_or(0)
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PlanTiming {
    /// Local planning time, aligned with [`PlanReport::local_plans`].
    pub local: Vec<Duration>,
    pub total: Duration,
}

impl PlanTiming {
    pub fn local_total(&self) -> Duration {
        self.local.iter().sum()
    }
}

#[derive(Debug, Clone)]
pub struct PlanResult {
    pub desired_path: GlobalPath,
    pub final_path: GlobalPath,
    pub discontinuities: Vec<Discontinuity>,
    pub local_paths: Vec<LocalPath>,
    /// Tree of each successful local attempt.
    pub trees: Vec<Tree>,
    /// Inclusive index range each repaired span occupies in `final_path`.
    pub final_spans: Vec<(usize, usize)>,
    pub report: PlanReport,
    pub timing: PlanTiming,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlanOptions {
    pub margin: usize,
    /// Step for the final dense validation. `None` uses
    /// [`QuadModel::collision_step`].
    pub validation_step: Option<f64>,
}

impl Default for PlanOptions {
    fn default() -> Self {
        PlanOptions {
            margin: DEFAULT_MARGIN,
            validation_step: None,
        }
    }
}

/// Plans an arc shot with default options.
pub fn plan_shot(
    w: &World,
    q: &QuadModel,
    spec: &ArcShotSpec,
    p: &RrtParams,
) -> Result<PlanResult> {
    plan_shot_with(w, q, spec, p, &PlanOptions::default())
}

pub fn plan_shot_with(
    w: &World,
    q: &QuadModel,
    spec: &ArcShotSpec,
    p: &RrtParams,
    opts: &PlanOptions,
) -> Result<PlanResult> {
    let arc = generate_arc(spec)?;
    plan_path(w, q, arc, spec.target, p, opts)
}

/// Repairs any desired path. Yaw on repaired samples faces `target`.
pub fn plan_path(
    w: &World,
    q: &QuadModel,
    desired: GlobalPath,
    target: Vec3,
    p: &RrtParams,
    opts: &PlanOptions,
) -> Result<PlanResult> {
    q.validate()?;
    p.validate()?;
    let started = Instant::now();
    let discontinuities = find_discontinuities(&desired, w, q, opts.margin)?;

    let mut local_paths = Vec::with_capacity(discontinuities.len());
    let mut trees = Vec::with_capacity(discontinuities.len());
    let mut stats = Vec::with_capacity(discontinuities.len());
    let mut local_times = Vec::with_capacity(discontinuities.len());
    for (i, d) in discontinuities.iter().enumerate() {
        let t0 = Instant::now();
        let plan = plan_local(d, i, w, q, p)?;
        local_times.push(t0.elapsed());
        stats.push(LocalPlanStats {
            discontinuity: i,
            entry_index: d.entry_index,
            exit_index: d.exit_index,
            node_count: plan.run.tree.len(),
            loops: plan.loops,
            expansion_level: plan.level,
            cost: plan.path.cost,
        });
        local_paths.push(plan.path);
        trees.push(plan.run.tree);
    }

    let (final_path, final_spans) = splice_all(&desired, &discontinuities, &local_paths, target)?;
    let step = opts.validation_step.unwrap_or_else(|| q.collision_step());
    validate(&final_path, w, q, step)?;

    let totals = PlanTotals {
        discontinuities: discontinuities.len(),
        node_count: stats.iter().map(|s| s.node_count).sum(),
        loops: stats.iter().map(|s| s.loops).sum(),
        final_length: final_path.length(),
        final_samples: final_path.len(),
    };
    Ok(PlanResult {
        desired_path: desired,
        final_path,
        discontinuities,
        local_paths,
        trees,
        final_spans,
        report: PlanReport {
            seed: p.seed,
            margin: opts.margin,
            quad: *q,
            params: *p,
            local_plans: stats,
            totals,
        },
        timing: PlanTiming {
            local: local_times,
            total: started.elapsed(),
        },
    })
}

fn check_endpoint(end: &'static str, got: Option<&Vec3>, want: Vec3) -> Result<()> {
    let offset = got.map_or(f64::INFINITY, |p| p.distance(want));
    if offset > SPLICE_TOLERANCE {
        return Err(Error::SpliceMismatch { end, offset });
    }
    Ok(())
}

/// Replaces the samples strictly between `d`'s entry and exit with the local
/// path's interior. Inserted samples face `target`.
pub fn splice(path: &GlobalPath, d: &Discontinuity, lp: &LocalPath, target: Vec3) -> Result<GlobalPath> {
    check_endpoint("entry", lp.positions.first(), d.entry_pose.position)?;
    check_endpoint("exit", lp.positions.last(), d.exit_pose.position)?;
    let interior = &lp.positions[1..lp.positions.len() - 1];
    let mut poses = Vec::with_capacity(path.len() + interior.len());
    poses.extend_from_slice(&path.poses[..=d.entry_index]);
    for &p in interior {
        poses.push(Pose4 {
            position: p,
            yaw: face_target(p, target)?,
        });
    }
    poses.extend_from_slice(&path.poses[d.exit_index..]);
    Ok(GlobalPath {
        poses,
        spec: path.spec,
    })
}

/// Splices every local path, last discontinuity first so earlier indices stay
/// valid. Returns the spliced path and each repaired span's index range in it.
pub fn splice_all(
    path: &GlobalPath,
    discs: &[Discontinuity],
    local_paths: &[LocalPath],
    target: Vec3,
) -> Result<(GlobalPath, Vec<(usize, usize)>)> {
    let mut out = path.clone();
    for (d, lp) in discs.iter().zip(local_paths).rev() {
        out = splice(&out, d, lp, target)?;
    }
    let mut spans = Vec::with_capacity(discs.len());
    let mut shift: isize = 0;
    for (d, lp) in discs.iter().zip(local_paths) {
        let entry = (d.entry_index as isize + shift) as usize;
        let replaced = lp.positions.len() - 1;
        spans.push((entry, entry + replaced));
        shift += replaced as isize - (d.exit_index - d.entry_index) as isize;
    }
    Ok((out, spans))
}

/// Dense collision check of every consecutive segment. A single-pose path is
/// checked as a point.
pub fn validate(path: &GlobalPath, w: &World, q: &QuadModel, step: f64) -> Result<()> {
    if path.len() == 1 && !is_free(w, q, path.poses[0].position) {
        return Err(Error::ValidationFailed { segment: 0 });
    }
    for (i, seg) in path.poses.windows(2).enumerate() {
        if !segment_free(w, q, seg[0].position, seg[1].position, step) {
            return Err(Error::ValidationFailed { segment: i });
        }
    }
    Ok(())
}
