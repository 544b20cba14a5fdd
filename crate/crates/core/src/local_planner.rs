//! Local repair of a blocked span with a windowed, anytime RRT*.
//!
//! Two departures from textbook RRT*:
//!
//! * samples are confined to a search window around the discontinuity that
//!   grows by a fixed factor after each failed attempt;
//! * the parent of every new node is chosen among all tree nodes within
//!   `extend_dist * neighbor_factor`, not only the immediate neighbourhood.
//!
//! Existing nodes are never rewired through a new node.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::discontinuity::Discontinuity;
use crate::error::{ensure, ensure_positive, Error, Result};
use crate::world::{segment_free, AxisBox, QuadModel, Vec3, World};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RrtParams {
    /// Fixed steering step from the nearest node toward a sample.
    pub extend_dist: f64,
    /// Parent-search radius is `extend_dist * neighbor_factor`.
    pub neighbor_factor: f64,
    pub max_loops: usize,
    pub goal_radius: f64,
    pub window_pad: f64,
    pub window_growth: f64,
    pub fail_limit: u32,
    pub seed: u64,
    /// Segment sampling step. `None` uses [`QuadModel::collision_step`].
    #[serde(skip_serializing_if = "Option::is_none")]
    pub collision_step: Option<f64>,
}

impl Default for RrtParams {
    fn default() -> Self {
        RrtParams {
            extend_dist: 0.75,
            neighbor_factor: 2.0,
            max_loops: 500,
            goal_radius: 0.5,
            window_pad: 1.0,
            window_growth: 1.5,
            fail_limit: 4,
            seed: 0,
            collision_step: None,
        }
    }
}

impl RrtParams {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("extend_dist", self.extend_dist)?;
        ensure(
            self.neighbor_factor > 1.0 && self.neighbor_factor.is_finite(),
            "neighbor_factor",
            || format!("must exceed 1, got {}", self.neighbor_factor),
        )?;
        ensure(self.max_loops >= 1, "max_loops", || "must be at least 1".into())?;
        ensure_positive("goal_radius", self.goal_radius)?;
        ensure(
            self.window_pad >= 0.0 && self.window_pad.is_finite(),
            "window_pad",
            || format!("must be non-negative, got {}", self.window_pad),
        )?;
        ensure(
            self.window_growth > 1.0 && self.window_growth.is_finite(),
            "window_growth",
            || format!("must exceed 1, got {}", self.window_growth),
        )?;
        ensure(self.fail_limit >= 1, "fail_limit", || "must be at least 1".into())?;
        if let Some(step) = self.collision_step {
            ensure_positive("collision_step", step)?;
        }
        Ok(())
    }

    pub fn neighbor_radius(&self) -> f64 {
        self.extend_dist * self.neighbor_factor
    }

    pub fn step_for(&self, q: &QuadModel) -> f64 {
        self.collision_step.unwrap_or_else(|| q.collision_step())
    }
}

/// Region in which new nodes may be sampled.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SearchWindow {
    pub bounds: AxisBox,
    /// Number of expansions applied.
    pub level: u32,
}

/// Bounding box of the entry and exit positions padded by `pad`, clamped to
/// the world.
pub fn initial_window(d: &Discontinuity, pad: f64, world_bounds: &AxisBox) -> SearchWindow {
    SearchWindow {
        bounds: AxisBox::spanning(d.entry_pose.position, d.exit_pose.position)
            .grown(pad)
            .clamped_to(world_bounds),
        level: 0,
    }
}

/// Scales the window about its centre by `growth` on every axis.
pub fn expand_window(w: &SearchWindow, growth: f64, world_bounds: &AxisBox) -> SearchWindow {
    let center = w.bounds.center();
    let half = w.bounds.half_extents() * growth;
    SearchWindow {
        bounds: AxisBox {
            min: center - half,
            max: center + half,
        }
        .clamped_to(world_bounds),
        level: w.level + 1,
    }
}

/// Uniform sample inside the window.
pub fn sample<R: Rng + ?Sized>(w: &SearchWindow, rng: &mut R) -> Vec3 {
    let b = &w.bounds;
    let mut axis = |lo: f64, hi: f64| lo + (hi - lo) * rng.gen::<f64>();
    let x = axis(b.min.x, b.max.x);
    let y = axis(b.min.y, b.max.y);
    let z = axis(b.min.z, b.max.z);
    Vec3::new(x, y, z)
}

pub type NodeId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Node {
    pub position: Vec3,
    pub parent: Option<NodeId>,
    /// Path length from the root.
    pub cost: f64,
}

/// Append-only node store. Node ids are insertion indices; the root is 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tree {
    nodes: Vec<Node>,
}

impl Tree {
    pub fn new(root: Vec3) -> Self {
        Tree {
            nodes: vec![Node {
                position: root,
                parent: None,
                cost: 0.0,
            }],
        }
    }

    pub const ROOT: NodeId = 0;

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Adds `position` as a child of `parent`, costing it by edge length.
    pub fn insert(&mut self, position: Vec3, parent: NodeId) -> NodeId {
        let p = &self.nodes[parent];
        let cost = p.cost + p.position.distance(position);
        self.nodes.push(Node {
            position,
            parent: Some(parent),
            cost,
        });
        self.nodes.len() - 1
    }

    /// Positions from the root to `id`.
    pub fn path_to(&self, id: NodeId) -> Vec<Vec3> {
        let mut out = Vec::new();
        let mut cur = Some(id);
        while let Some(i) = cur {
            out.push(self.nodes[i].position);
            cur = self.nodes[i].parent;
        }
        out.reverse();
        out
    }

    /// `(parent, child)` position pairs for every edge.
    pub fn edges(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        self.nodes
            .iter()
            .filter_map(|n| n.parent.map(|p| (self.nodes[p].position, n.position)))
    }
}

/// Node closest to `p`; the earliest inserted wins ties.
pub fn nearest_vertex(t: &Tree, p: Vec3) -> NodeId {
    let mut best = Tree::ROOT;
    let mut best_d = f64::INFINITY;
    for (i, n) in t.nodes.iter().enumerate() {
        let d = n.position.distance(p);
        if d < best_d {
            best = i;
            best_d = d;
        }
    }
    best
}

/// Steers from `from` toward `toward` by at most `extend_dist`.
pub fn extend(from: Vec3, toward: Vec3, extend_dist: f64) -> Result<Vec3> {
    let delta = toward - from;
    let dist = delta.norm();
    if dist == 0.0 {
        return Err(Error::DegenerateExtend);
    }
    if dist <= extend_dist {
        Ok(toward)
    } else {
        Ok(from + delta * (extend_dist / dist))
    }
}

/// Lowest-cost node within `radius` of `x_new` whose edge to it is free.
pub fn best_parent(
    t: &Tree,
    x_new: Vec3,
    radius: f64,
    w: &World,
    q: &QuadModel,
    step: f64,
) -> Option<NodeId> {
    let mut best: Option<(NodeId, f64)> = None;
    for (i, n) in t.nodes.iter().enumerate() {
        let d = n.position.distance(x_new);
        if d > radius {
            continue;
        }
        let cost = n.cost + d;
        if best.is_some_and(|(_, c)| cost >= c) {
            continue;
        }
        if segment_free(w, q, n.position, x_new, step) {
            best = Some((i, cost));
        }
    }
    best.map(|(i, _)| i)
}

/// Positions from a discontinuity's entry to its exit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalPath {
    pub positions: Vec<Vec3>,
    pub cost: f64,
}

/// Everything one RRT* attempt produced, kept for reporting and inspection.
#[derive(Debug, Clone)]
pub struct RrtRun {
    pub window: SearchWindow,
    pub tree: Tree,
    pub loops: usize,
    pub solution: Option<LocalPath>,
    /// `(loop index, cost)` each time the best solution improved.
    pub improvements: Vec<(usize, f64)>,
}

/// The search window after `level` expansions.
pub fn window_at_level(
    d: &Discontinuity,
    w: &World,
    p: &RrtParams,
    level: u32,
) -> SearchWindow {
    let mut window = initial_window(d, p.window_pad, &w.bounds);
    for _ in 0..level {
        window = expand_window(&window, p.window_growth, &w.bounds);
    }
    window
}

/// One anytime RRT* attempt inside the window expanded `level` times.
/// Runs exactly `max_loops` iterations and keeps the cheapest goal connection.
pub fn rrt_star_with_rng<R: Rng + ?Sized>(
    d: &Discontinuity,
    w: &World,
    q: &QuadModel,
    p: &RrtParams,
    level: u32,
    rng: &mut R,
) -> RrtRun {
    let window = window_at_level(d, w, p, level);
    let step = p.step_for(q);
    let radius = p.neighbor_radius();
    let goal = d.exit_pose.position;
    let mut tree = Tree::new(d.entry_pose.position);
    let mut best: Option<(NodeId, f64)> = None;
    let mut improvements = Vec::new();

    for loop_index in 0..p.max_loops {
        let x_rand = sample(&window, rng);
        let nearest = nearest_vertex(&tree, x_rand);
        let Ok(x_new) = extend(tree.node(nearest).position, x_rand, p.extend_dist) else {
            continue;
        };
        let Some(parent) = best_parent(&tree, x_new, radius, w, q, step) else {
            continue;
        };
        let id = tree.insert(x_new, parent);

        let to_goal = x_new.distance(goal);
        if to_goal <= p.goal_radius && segment_free(w, q, x_new, goal, step) {
            let cost = tree.node(id).cost + to_goal;
            if best.is_none_or(|(_, c)| cost < c) {
                best = Some((id, cost));
                improvements.push((loop_index, cost));
            }
        }
    }

    let solution = best.map(|(id, cost)| {
        let mut positions = tree.path_to(id);
        if positions.last() != Some(&goal) {
            positions.push(goal);
        }
        LocalPath { positions, cost }
    });
    RrtRun {
        window,
        tree,
        loops: p.max_loops,
        solution,
        improvements,
    }
}

/// Deterministic rng stream for one attempt. Each `(discontinuity, level)`
/// pair gets its own ChaCha stream under the run seed.
pub fn attempt_rng(seed: u64, discontinuity: usize, level: u32) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((discontinuity as u64) << 32) | u64::from(level));
    rng
}

/// [`rrt_star_with_rng`] seeded from `p.seed` for discontinuity 0.
pub fn rrt_star(
    d: &Discontinuity,
    w: &World,
    q: &QuadModel,
    p: &RrtParams,
    level: u32,
) -> Option<LocalPath> {
    let mut rng = attempt_rng(p.seed, 0, level);
    rrt_star_with_rng(d, w, q, p, level, &mut rng).solution
}

/// Result of repairing one discontinuity.
#[derive(Debug, Clone)]
pub struct LocalPlan {
    pub path: LocalPath,
    /// Expansion level of the successful attempt.
    pub level: u32,
    /// Loops run across all attempts.
    pub loops: usize,
    /// Successful attempt, including its tree.
    pub run: RrtRun,
}

/// Retries RRT* with a growing window until it succeeds or `fail_limit`
/// attempts have failed.
pub fn plan_local(
    d: &Discontinuity,
    index: usize,
    w: &World,
    q: &QuadModel,
    p: &RrtParams,
) -> Result<LocalPlan> {
    let mut loops = 0;
    for level in 0..p.fail_limit {
        let mut rng = attempt_rng(p.seed, index, level);
        let run = rrt_star_with_rng(d, w, q, p, level, &mut rng);
        loops += run.loops;
        if let Some(path) = run.solution.clone() {
            return Ok(LocalPlan {
                path,
                level,
                loops,
                run,
            });
        }
    }
    Err(Error::LocalPlanFailed {
        discontinuity: index,
        attempts: p.fail_limit,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shot::Pose4;
    use crate::world::Obstacle;
    use approx::assert_abs_diff_eq;

    fn bounds() -> AxisBox {
        AxisBox::new(Vec3::new(-20.0, -20.0, 0.0), Vec3::new(20.0, 20.0, 10.0)).unwrap()
    }

    fn disc(entry: Vec3, exit: Vec3) -> Discontinuity {
        Discontinuity {
            entry_index: 0,
            exit_index: 2,
            entry_pose: Pose4::new(entry, 0.0),
            exit_pose: Pose4::new(exit, 0.0),
            blocked_runs: vec![(1, 1)],
        }
    }

    #[test]
    fn initial_window_pads_and_clamps() {
        let d = disc(Vec3::new(0.0, 0.0, 2.0), Vec3::new(4.0, 0.0, 2.0));
        let w = initial_window(&d, 1.0, &bounds());
        assert_eq!(w.bounds.min, Vec3::new(-1.0, -1.0, 1.0));
        assert_eq!(w.bounds.max, Vec3::new(5.0, 1.0, 3.0));
        assert_eq!(w.level, 0);

        let d = disc(Vec3::new(19.5, 0.0, 0.5), Vec3::new(19.5, 3.0, 0.5));
        let w = initial_window(&d, 1.0, &bounds());
        assert!(bounds().contains_box(&w.bounds));
        assert_eq!(w.bounds.max.x, 20.0);
        assert_eq!(w.bounds.min.z, 0.0);
    }

    #[test]
    fn point_window_samples_its_point() {
        let p = Vec3::new(1.0, 2.0, 3.0);
        let w = initial_window(&disc(p, p), 0.0, &bounds());
        let mut rng = attempt_rng(1, 0, 0);
        for _ in 0..10 {
            assert_eq!(sample(&w, &mut rng), p);
        }
    }

    #[test]
    fn expand_scales_about_center() {
        let w = SearchWindow {
            bounds: AxisBox::new(Vec3::new(-2.0, -1.0, 1.0), Vec3::new(2.0, 1.0, 3.0)).unwrap(),
            level: 0,
        };
        let e = expand_window(&w, 1.5, &bounds());
        assert_eq!(e.bounds.center(), w.bounds.center());
        assert_eq!(e.bounds.half_extents(), Vec3::new(3.0, 1.5, 1.5));
        assert_eq!(e.level, 1);

        let twice = expand_window(&e, 1.5, &bounds());
        let once = expand_window(&w, 2.25, &bounds());
        assert_abs_diff_eq!(twice.bounds.min.x, once.bounds.min.x, epsilon = 1e-12);
        assert_abs_diff_eq!(twice.bounds.max.z, once.bounds.max.z, epsilon = 1e-12);
        assert_eq!(twice.level, 2);

        let full = SearchWindow { bounds: bounds(), level: 3 };
        let e = expand_window(&full, 2.0, &bounds());
        assert_eq!(e.bounds, bounds());
        assert_eq!(e.level, 4);
    }

    #[test]
    fn sampling_is_uniform_and_deterministic() {
        let w = SearchWindow {
            bounds: AxisBox::new(Vec3::ZERO, Vec3::splat(1.0)).unwrap(),
            level: 0,
        };
        let mut rng = attempt_rng(42, 0, 0);
        let pts: Vec<Vec3> = (0..10_000).map(|_| sample(&w, &mut rng)).collect();
        let mean = pts.iter().fold(Vec3::ZERO, |a, &p| a + p) * (1.0 / pts.len() as f64);
        for m in [mean.x, mean.y, mean.z] {
            assert!((m - 0.5).abs() < 0.02, "mean {m}");
        }
        let mut again = attempt_rng(42, 0, 0);
        assert!(pts.iter().all(|&p| p == sample(&w, &mut again)));
    }

    #[test]
    fn nearest_prefers_first_on_ties() {
        let mut t = Tree::new(Vec3::ZERO);
        assert_eq!(nearest_vertex(&t, Vec3::new(5.0, 5.0, 5.0)), 0);
        t.insert(Vec3::new(10.0, 0.0, 0.0), 0);
        assert_eq!(nearest_vertex(&t, Vec3::new(4.0, 0.0, 0.0)), 0);
        assert_eq!(nearest_vertex(&t, Vec3::new(5.0, 0.0, 0.0)), 0);
        assert_eq!(nearest_vertex(&t, Vec3::new(6.0, 0.0, 0.0)), 1);
    }

    #[test]
    fn extend_steps() {
        let o = Vec3::ZERO;
        assert_eq!(extend(o, Vec3::new(10.0, 0.0, 0.0), 1.0).unwrap(), Vec3::new(1.0, 0.0, 0.0));
        assert_eq!(extend(o, Vec3::new(0.5, 0.0, 0.0), 1.0).unwrap(), Vec3::new(0.5, 0.0, 0.0));
        assert_eq!(extend(o, o, 1.0), Err(Error::DegenerateExtend));
    }

    #[test]
    fn best_parent_tie_goes_to_root() {
        let w = World::new(bounds(), vec![], Vec3::new(0.0, 0.0, 5.0)).unwrap();
        let q = QuadModel::default();
        let mut t = Tree::new(Vec3::new(0.0, 0.0, 1.0));
        t.insert(Vec3::new(1.0, 0.0, 1.0), 0);
        // candidates: root 0 + 1.5, child 1 + 0.5
        assert_eq!(best_parent(&t, Vec3::new(1.5, 0.0, 1.0), 2.0, &w, &q, 0.15), Some(0));
        // out of the root's reach only the child remains
        assert_eq!(best_parent(&t, Vec3::new(2.5, 0.0, 1.0), 2.0, &w, &q, 0.15), Some(1));
        assert_eq!(best_parent(&t, Vec3::new(9.0, 0.0, 1.0), 2.0, &w, &q, 0.15), None);
    }

    #[test]
    fn best_parent_skips_blocked_edges() {
        let w = World::new(
            bounds(),
            vec![Obstacle::cylinder(Vec3::new(1.0, 0.0, 0.0), 0.2, 5.0).unwrap()],
            Vec3::new(0.0, 5.0, 1.0),
        )
        .unwrap();
        let q = QuadModel::default();
        let t = Tree::new(Vec3::new(0.0, 0.0, 1.0));
        assert_eq!(best_parent(&t, Vec3::new(2.0, 0.0, 1.0), 3.0, &w, &q, 0.15), None);
    }

    #[test]
    fn enclosed_goal_is_unreachable() {
        // exit sits in a free pocket inside a hollow box shell
        let shell = [
            Obstacle::axis_box(Vec3::new(3.0, -2.0, 0.0), Vec3::new(3.2, 2.0, 6.0)).unwrap(),
            Obstacle::axis_box(Vec3::new(6.8, -2.0, 0.0), Vec3::new(7.0, 2.0, 6.0)).unwrap(),
            Obstacle::axis_box(Vec3::new(3.0, -2.0, 0.0), Vec3::new(7.0, -1.8, 6.0)).unwrap(),
            Obstacle::axis_box(Vec3::new(3.0, 1.8, 0.0), Vec3::new(7.0, 2.0, 6.0)).unwrap(),
            Obstacle::axis_box(Vec3::new(3.0, -2.0, 5.8), Vec3::new(7.0, 2.0, 6.0)).unwrap(),
        ];
        let w = World::new(bounds(), shell.to_vec(), Vec3::new(0.0, 10.0, 1.0)).unwrap();
        let q = QuadModel::default();
        let d = disc(Vec3::new(-2.0, 0.0, 2.0), Vec3::new(5.0, 0.0, 2.0));
        assert!(crate::world::is_free(&w, &q, d.exit_pose.position));
        let p = RrtParams { max_loops: 300, ..RrtParams::default() };
        for level in 0..3 {
            assert!(rrt_star(&d, &w, &q, &p, level).is_none());
        }
        assert_eq!(
            plan_local(&d, 3, &w, &q, &RrtParams { fail_limit: 2, max_loops: 200, ..p })
                .map(|_| ())
                .unwrap_err(),
            Error::LocalPlanFailed { discontinuity: 3, attempts: 2 }
        );
    }

    #[test]
    fn open_detour_succeeds_at_level_zero() {
        let w = World::new(
            bounds(),
            vec![Obstacle::cylinder(Vec3::ZERO, 0.2, 5.0).unwrap()],
            Vec3::new(0.0, -10.0, 1.0),
        )
        .unwrap();
        let q = QuadModel::default();
        let d = disc(Vec3::new(-3.0, 0.0, 2.0), Vec3::new(3.0, 0.0, 2.0));
        let plan = plan_local(&d, 0, &w, &q, &RrtParams::default()).unwrap();
        assert_eq!(plan.level, 0);
        assert_eq!(plan.loops, RrtParams::default().max_loops);
        let pts = &plan.path.positions;
        assert_eq!(pts[0], d.entry_pose.position);
        assert_eq!(*pts.last().unwrap(), d.exit_pose.position);
        let len: f64 = pts.windows(2).map(|s| s[0].distance(s[1])).sum();
        assert_abs_diff_eq!(len, plan.path.cost, epsilon = 1e-9);
    }

    #[test]
    fn attempts_use_distinct_streams() {
        let a: u64 = attempt_rng(7, 0, 0).gen();
        let b: u64 = attempt_rng(7, 0, 1).gen();
        let c: u64 = attempt_rng(7, 1, 0).gen();
        assert!(a != b && a != c && b != c);
    }
}
