//! Kinematic path following: a velocity-commanded point with proportional
//! tracking, integrated with explicit Euler.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};
use crate::shot::{normalize_angle, GlobalPath, Pose4};
use crate::world::{QuadModel, Vec3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimState {
    pub position: Vec3,
    pub yaw: f64,
    pub time: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VelocityCommand {
    pub linear: Vec3,
    pub yaw_rate: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FollowConfig {
    pub dt: f64,
    pub k_p: f64,
    pub waypoint_tolerance: f64,
    pub max_time: f64,
}

impl Default for FollowConfig {
    fn default() -> Self {
        FollowConfig {
            dt: 0.02,
            k_p: 2.0,
            waypoint_tolerance: 0.1,
            max_time: 600.0,
        }
    }
}

impl FollowConfig {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("dt", self.dt)?;
        ensure_positive("k_p", self.k_p)?;
        ensure_positive("waypoint_tolerance", self.waypoint_tolerance)?;
        ensure_positive("max_time", self.max_time)?;
        ensure(self.k_p * self.dt < 1.0, "k_p", || {
            format!("k_p * dt must stay below 1 for stable integration, got {}", self.k_p * self.dt)
        })
    }
}

/// Saturated proportional command toward `target`.
pub fn command_for(s: &SimState, target: &Pose4, cfg: &FollowConfig, q: &QuadModel) -> VelocityCommand {
    let mut linear = (target.position - s.position) * cfg.k_p;
    let speed = linear.norm();
    if speed > q.max_speed {
        linear = linear * (q.max_speed / speed);
    }
    let yaw_rate = (cfg.k_p * normalize_angle(target.yaw - s.yaw))
        .clamp(-q.max_yaw_rate, q.max_yaw_rate);
    VelocityCommand { linear, yaw_rate }
}

/// Applies `cmd` for `dt` seconds.
pub fn step(s: &SimState, cmd: &VelocityCommand, dt: f64) -> SimState {
    SimState {
        position: s.position + cmd.linear * dt,
        yaw: normalize_angle(s.yaw + cmd.yaw_rate * dt),
        time: s.time + dt,
    }
}

/// One logged simulation step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    pub state: SimState,
    /// Waypoint being tracked; `None` during takeoff.
    pub waypoint: Option<usize>,
}

/// Takes off vertically to the first waypoint's altitude, then tracks the
/// waypoints in order. The returned log starts with `start`.
pub fn follow(
    path: &GlobalPath,
    start: SimState,
    cfg: &FollowConfig,
    q: &QuadModel,
) -> Result<Vec<SimState>> {
    follow_logged(path, start, cfg, q).map(|log| log.into_iter().map(|e| e.state).collect())
}

/// [`follow`] with the active waypoint recorded for every state.
pub fn follow_logged(
    path: &GlobalPath,
    start: SimState,
    cfg: &FollowConfig,
    q: &QuadModel,
) -> Result<Vec<LogEntry>> {
    cfg.validate()?;
    q.validate()?;
    let first = path
        .poses
        .first()
        .ok_or_else(|| Error::InvalidInput("cannot follow an empty path".into()))?;

    let takeoff = Pose4 {
        position: Vec3::new(start.position.x, start.position.y, first.position.z),
        yaw: start.yaw,
    };
    let mut log = vec![LogEntry { state: start, waypoint: None }];
    let mut s = start;
    let mut active: Option<usize> = None;
    loop {
        let target = match active {
            None => takeoff,
            Some(i) => path.poses[i],
        };
        if s.position.distance(target.position) <= cfg.waypoint_tolerance {
            let next = active.map_or(0, |i| i + 1);
            if next == path.len() {
                return Ok(log);
            }
            active = Some(next);
            continue;
        }
        if s.time >= cfg.max_time {
            return Err(Error::TimeoutExceeded {
                max_time: cfg.max_time,
                log: log.into_iter().map(|e| e.state).collect(),
            });
        }
        let cmd = command_for(&s, &target, cfg, q);
        s = step(&s, &cmd, cfg.dt);
        log.push(LogEntry { state: s, waypoint: active });
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn at(x: f64, y: f64, z: f64, yaw: f64) -> SimState {
        SimState { position: Vec3::new(x, y, z), yaw, time: 0.0 }
    }

    #[test]
    fn zero_error_zero_command() {
        let s = at(1.0, 2.0, 3.0, 0.4);
        let cmd = command_for(&s, &Pose4::new(s.position, 0.4), &FollowConfig::default(), &QuadModel::default());
        assert_eq!(cmd.linear, Vec3::ZERO);
        assert_eq!(cmd.yaw_rate, 0.0);
    }

    #[test]
    fn speed_saturates() {
        let q = QuadModel { max_speed: 2.0, ..QuadModel::default() };
        let cfg = FollowConfig { k_p: 1.0, ..FollowConfig::default() };
        let cmd = command_for(&at(0.0, 0.0, 0.0, 0.0), &Pose4::new(Vec3::new(10.0, 0.0, 0.0), 0.0), &cfg, &q);
        assert_abs_diff_eq!(cmd.linear.x, 2.0, epsilon = 1e-12);
        assert_eq!(cmd.linear.y, 0.0);
    }

    #[test]
    fn yaw_takes_the_short_way() {
        let q = QuadModel { max_yaw_rate: 100.0, ..QuadModel::default() };
        let cfg = FollowConfig { k_p: 1.0, ..FollowConfig::default() };
        let eps = 0.1;
        // from +3 rad to -3 rad is a small positive rotation across pi
        let cmd = command_for(&at(0.0, 0.0, 0.0, 3.0), &Pose4::new(Vec3::ZERO, -3.0), &cfg, &q);
        assert_abs_diff_eq!(cmd.yaw_rate, 2.0 * PI - 6.0, epsilon = 1e-12);
        // raw error -pi + eps is already shortest
        let cmd = command_for(&at(0.0, 0.0, 0.0, 0.0), &Pose4::new(Vec3::ZERO, -PI + eps), &cfg, &q);
        assert_abs_diff_eq!(cmd.yaw_rate, -(PI - eps), epsilon = 1e-12);
    }

    #[test]
    fn takeoff_only_is_vertical() {
        let path = GlobalPath::from_poses(vec![Pose4::new(Vec3::new(1.0, -2.0, 2.0), 0.0)]);
        let log = follow(&path, at(1.0, -2.0, 0.0, 0.0), &FollowConfig::default(), &QuadModel::default()).unwrap();
        assert!(log.len() > 2);
        for s in &log {
            assert_eq!((s.position.x, s.position.y), (1.0, -2.0));
        }
        assert!(log.windows(2).all(|w| w[1].position.z >= w[0].position.z));
        assert!(log.last().unwrap().position.distance(Vec3::new(1.0, -2.0, 2.0)) <= 0.1);
    }

    #[test]
    fn two_waypoints_converge() {
        let path = GlobalPath::from_poses(vec![
            Pose4::new(Vec3::new(0.0, 0.0, 2.0), 0.0),
            Pose4::new(Vec3::new(5.0, 0.0, 2.0), 0.0),
        ]);
        let cfg = FollowConfig::default();
        let log = follow_logged(&path, at(0.0, 0.0, 0.0, 0.0), &cfg, &QuadModel::default()).unwrap();
        let end = log.last().unwrap().state;
        assert!(end.position.distance(Vec3::new(5.0, 0.0, 2.0)) <= cfg.waypoint_tolerance);
        // active waypoint never goes backwards
        let idx: Vec<i64> = log.iter().map(|e| e.waypoint.map_or(-1, |w| w as i64)).collect();
        assert!(idx.windows(2).all(|w| w[1] >= w[0]));
        assert!(log.windows(2).all(|w| w[1].state.time > w[0].state.time));
    }

    #[test]
    fn timeout_keeps_partial_log() {
        let path = GlobalPath::from_poses(vec![Pose4::new(Vec3::new(0.0, 0.0, 50.0), 0.0)]);
        let cfg = FollowConfig { max_time: 1.0, ..FollowConfig::default() };
        match follow(&path, at(0.0, 0.0, 0.0, 0.0), &cfg, &QuadModel::default()) {
            Err(Error::TimeoutExceeded { log, .. }) => {
                assert!(!log.is_empty());
                assert!(log.last().unwrap().time >= 1.0 - 1e-9);
            }
            other => panic!("expected timeout, got {other:?}"),
        }
    }

    #[test]
    fn unstable_gain_rejected() {
        let cfg = FollowConfig { k_p: 60.0, dt: 0.02, ..FollowConfig::default() };
        assert!(cfg.validate().is_err());
    }
}
