//! Arc shot generation: the obstacle-ignoring camera path that sweeps around
//! a target while the camera keeps facing it.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::world::Vec3;

/// Planning state: position plus heading about z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Pose4 {
    pub position: Vec3,
    pub yaw: f64,
}

impl Pose4 {
    pub fn new(position: Vec3, yaw: f64) -> Self {
        Pose4 {
            position,
            yaw: normalize_angle(yaw),
        }
    }
}

/// Wraps an angle into (-pi, pi].
pub fn normalize_angle(a: f64) -> f64 {
    let r = a.rem_euclid(TAU);
    if r > PI {
        r - TAU
    } else {
        r
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Clockwise,
    Counterclockwise,
}

pub const DEFAULT_SAMPLE_COUNT: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArcShotSpec {
    pub start: Vec3,
    pub end: Vec3,
    pub target: Vec3,
    pub direction: Direction,
    pub sample_count: usize,
}

impl ArcShotSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.start.is_finite() && self.end.is_finite() && self.target.is_finite()) {
            return Err(Error::InvalidInput("shot points must be finite".into()));
        }
        if self.sample_count < 2 {
            return Err(Error::InvalidInput(format!(
                "sample_count must be at least 2, got {}",
                self.sample_count
            )));
        }
        if horizontal_offset(self.start, self.target).horizontal_norm() == 0.0
            || horizontal_offset(self.end, self.target).horizontal_norm() == 0.0
        {
            return Err(Error::DegenerateArc);
        }
        Ok(())
    }
}

/// Ordered poses of a desired or final camera path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GlobalPath {
    pub poses: Vec<Pose4>,
    /// Shot the path was generated from, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spec: Option<ArcShotSpec>,
}

impl GlobalPath {
    pub fn from_poses(poses: Vec<Pose4>) -> Self {
        GlobalPath { poses, spec: None }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.poses.iter().map(|p| p.position)
    }

    /// Sum of segment lengths.
    pub fn length(&self) -> f64 {
        self.poses
            .windows(2)
            .map(|w| w[0].position.distance(w[1].position))
            .sum()
    }
}

fn horizontal_offset(from: Vec3, to: Vec3) -> Vec3 {
    Vec3::new(to.x - from.x, to.y - from.y, 0.0)
}

/// Heading of the horizontal ray from `p` to `target`.
pub fn face_target(p: Vec3, target: Vec3) -> Result<f64> {
    let d = horizontal_offset(p, target);
    if d.horizontal_norm() == 0.0 {
        return Err(Error::DegenerateHeading);
    }
    Ok(normalize_angle(d.y.atan2(d.x)))
}

/// Signed polar sweep from `from` to `to`. The magnitude lies in (0, 2pi];
/// equal angles give a full revolution.
pub fn arc_sweep(from: f64, to: f64, direction: Direction) -> f64 {
    match direction {
        Direction::Counterclockwise => {
            let d = (to - from).rem_euclid(TAU);
            if d == 0.0 {
                TAU
            } else {
                d
            }
        }
        Direction::Clockwise => {
            let d = (from - to).rem_euclid(TAU);
            if d == 0.0 {
                -TAU
            } else {
                -d
            }
        }
    }
}

/// Samples the arc shot. Polar angle, horizontal radius and altitude are each
/// interpolated linearly in the sample index; every yaw faces the target.
pub fn generate_arc(spec: &ArcShotSpec) -> Result<GlobalPath> {
    spec.validate()?;
    let rel_start = spec.start - spec.target;
    let rel_end = spec.end - spec.target;
    let r0 = rel_start.horizontal_norm();
    let r1 = rel_end.horizontal_norm();
    let a0 = rel_start.y.atan2(rel_start.x);
    let a1 = rel_end.y.atan2(rel_end.x);
    let sweep = arc_sweep(a0, a1, spec.direction);

    let n = spec.sample_count;
    let last = (n - 1) as f64;
    let mut poses = Vec::with_capacity(n);
    for i in 0..n {
        let position = if i == 0 {
            spec.start
        } else if i == n - 1 {
            spec.end
        } else {
            let t = i as f64 / last;
            let angle = a0 + sweep * t;
            let radius = r0 + (r1 - r0) * t;
            Vec3::new(
                spec.target.x + radius * angle.cos(),
                spec.target.y + radius * angle.sin(),
                spec.start.z + (spec.end.z - spec.start.z) * t,
            )
        };
        poses.push(Pose4 {
            position,
            yaw: face_target(position, spec.target)?,
        });
    }
    Ok(GlobalPath {
        poses,
        spec: Some(*spec),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::FRAC_PI_2;

    fn spec(start: Vec3, end: Vec3, direction: Direction, n: usize) -> ArcShotSpec {
        ArcShotSpec {
            start,
            end,
            target: Vec3::ZERO,
            direction,
            sample_count: n,
        }
    }

    #[test]
    fn normalize_range() {
        assert_eq!(normalize_angle(PI), PI);
        assert_eq!(normalize_angle(-PI), PI);
        assert_abs_diff_eq!(normalize_angle(3.0 * PI / 2.0), -FRAC_PI_2, epsilon = 1e-12);
        assert_abs_diff_eq!(normalize_angle(-5.0 * PI), PI, epsilon = 1e-12);
    }

    #[test]
    fn face_target_examples() {
        assert_abs_diff_eq!(face_target(Vec3::new(5.0, 0.0, 2.0), Vec3::ZERO).unwrap(), PI);
        assert_abs_diff_eq!(
            face_target(Vec3::new(0.0, -3.0, 1.0), Vec3::ZERO).unwrap(),
            FRAC_PI_2
        );
        assert_abs_diff_eq!(
            face_target(Vec3::new(1.0, 1.0, 0.0), Vec3::ZERO).unwrap(),
            -3.0 * PI / 4.0
        );
        assert_eq!(
            face_target(Vec3::new(0.0, 0.0, 4.0), Vec3::ZERO),
            Err(Error::DegenerateHeading)
        );
    }

    #[test]
    fn half_turn_ccw_passes_through_positive_y() {
        let s = spec(Vec3::new(5.0, 0.0, 2.0), Vec3::new(-5.0, 0.0, 2.0), Direction::Counterclockwise, 9);
        let path = generate_arc(&s).unwrap();
        let mid = path.poses[4];
        assert_abs_diff_eq!(mid.position.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.position.y, 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.position.z, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.yaw, -FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn half_turn_cw_passes_through_negative_y() {
        let s = spec(Vec3::new(5.0, 0.0, 2.0), Vec3::new(-5.0, 0.0, 2.0), Direction::Clockwise, 9);
        let path = generate_arc(&s).unwrap();
        let mid = path.poses[4];
        assert_abs_diff_eq!(mid.position.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.position.y, -5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mid.yaw, FRAC_PI_2, epsilon = 1e-12);
    }

    #[test]
    fn radius_and_altitude_interpolate_linearly() {
        let s = spec(Vec3::new(4.0, 0.0, 1.0), Vec3::new(0.0, 2.0, 3.0), Direction::Counterclockwise, 5);
        let path = generate_arc(&s).unwrap();
        let radii: Vec<f64> = path.positions().map(|p| p.horizontal_norm()).collect();
        let zs: Vec<f64> = path.positions().map(|p| p.z).collect();
        for (got, want) in radii.iter().zip([4.0, 3.5, 3.0, 2.5, 2.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
        for (got, want) in zs.iter().zip([1.0, 1.5, 2.0, 2.5, 3.0]) {
            assert_abs_diff_eq!(*got, want, epsilon = 1e-12);
        }
    }

    #[test]
    fn coincident_angles_make_a_full_revolution() {
        assert_eq!(arc_sweep(0.3, 0.3, Direction::Counterclockwise), TAU);
        assert_eq!(arc_sweep(0.3, 0.3, Direction::Clockwise), -TAU);
        // short way is clockwise, but ccw was requested
        assert_abs_diff_eq!(arc_sweep(0.0, -0.5, Direction::Counterclockwise), TAU - 0.5, epsilon = 1e-12);
        let s = spec(Vec3::new(3.0, 0.0, 1.0), Vec3::new(6.0, 0.0, 1.0), Direction::Counterclockwise, 5);
        let path = generate_arc(&s).unwrap();
        assert_abs_diff_eq!(path.poses[2].position.x, -4.5, epsilon = 1e-12);
    }

    #[test]
    fn rejects_degenerate_specs() {
        let s = spec(Vec3::new(0.0, 0.0, 3.0), Vec3::new(1.0, 0.0, 0.0), Direction::Clockwise, 8);
        assert_eq!(generate_arc(&s), Err(Error::DegenerateArc));
        let s = spec(Vec3::new(1.0, 0.0, 3.0), Vec3::new(2.0, 0.0, 0.0), Direction::Clockwise, 1);
        assert!(matches!(generate_arc(&s), Err(Error::InvalidInput(_))));
    }
}
