//! Reference scenes used by tests, benchmarks and the bundled scenario files.

use std::f64::consts::PI;

use rand::Rng;

use crate::shot::{ArcShotSpec, Direction, DEFAULT_SAMPLE_COUNT};
use crate::world::{AxisBox, Obstacle, Vec3, World};

fn desk_bounds() -> AxisBox {
    AxisBox {
        min: Vec3::new(-12.0, -12.0, 0.0),
        max: Vec3::new(12.0, 12.0, 8.0),
    }
}

/// Three obstacles and a target; a tree trunk stands on the half-circle arc
/// over the target, the other two props sit clear of it.
pub fn figure2() -> (World, ArcShotSpec) {
    let target = Vec3::new(0.0, 0.0, 1.0);
    let world = World {
        bounds: desk_bounds(),
        obstacles: vec![
            Obstacle::Cylinder {
                base_center: Vec3::new(0.0, 8.0, 0.0),
                radius: 0.6,
                height: 5.0,
            },
            Obstacle::Cylinder {
                base_center: Vec3::new(5.0, -5.0, 0.0),
                radius: 0.5,
                height: 4.0,
            },
            Obstacle::AxisBox {
                min: Vec3::new(-9.0, -9.0, 0.0),
                max: Vec3::new(-6.0, -6.0, 4.0),
            },
        ],
        target,
    };
    let shot = ArcShotSpec {
        start: Vec3::new(8.0, 0.0, 2.5),
        end: Vec3::new(-8.0, 0.0, 2.5),
        target,
        direction: Direction::Counterclockwise,
        sample_count: DEFAULT_SAMPLE_COUNT,
    };
    (world, shot)
}

/// A thin radial wall across the top of a half-circle arc. Its inflated
/// footprint spans the initial search window, so the local planner has to
/// widen the window before it can get around.
pub fn wall() -> (World, ArcShotSpec) {
    let target = Vec3::new(0.0, 0.0, 1.0);
    let world = World {
        bounds: desk_bounds(),
        obstacles: vec![Obstacle::AxisBox {
            min: Vec3::new(-0.3, 7.0, 0.0),
            max: Vec3::new(0.3, 9.0, 7.0),
        }],
        target,
    };
    let shot = ArcShotSpec {
        start: Vec3::new(8.0, 0.0, 2.0),
        end: Vec3::new(-8.0, 0.0, 2.0),
        target,
        direction: Direction::Counterclockwise,
        sample_count: DEFAULT_SAMPLE_COUNT,
    };
    (world, shot)
}

/// An arc around the origin with one obstacle placed on it, somewhere in the
/// middle half of the sweep.
pub fn random_single_obstacle<R: Rng + ?Sized>(rng: &mut R) -> (World, ArcShotSpec) {
    let target = Vec3::new(0.0, 0.0, 1.0);
    let radius = rng.gen_range(5.0..9.0);
    let z0 = rng.gen_range(1.5..3.0);
    let z1 = rng.gen_range(1.5..3.0);
    let a0 = rng.gen_range(-PI..PI);
    let sweep = rng.gen_range(0.5 * PI..1.5 * PI);
    let direction = if rng.gen_bool(0.5) {
        Direction::Counterclockwise
    } else {
        Direction::Clockwise
    };
    let signed = match direction {
        Direction::Counterclockwise => sweep,
        Direction::Clockwise => -sweep,
    };
    let a1 = a0 + signed;
    let at = |a: f64, r: f64, z: f64| Vec3::new(r * a.cos(), r * a.sin(), z);

    let t = rng.gen_range(0.3..0.7);
    let ao = a0 + signed * t;
    let ro = radius + rng.gen_range(-0.5..0.5);
    let centre = at(ao, ro, 0.0);
    let obstacle = if rng.gen_bool(0.7) {
        Obstacle::Cylinder {
            base_center: centre,
            radius: rng.gen_range(0.3..1.0),
            height: rng.gen_range(3.0..6.0),
        }
    } else {
        let half = Vec3::new(rng.gen_range(0.3..1.0), rng.gen_range(0.3..1.0), 0.0);
        Obstacle::AxisBox {
            min: centre - half,
            max: centre + half + Vec3::new(0.0, 0.0, rng.gen_range(3.0..6.0)),
        }
    };
    let world = World {
        bounds: AxisBox {
            min: Vec3::new(-15.0, -15.0, 0.0),
            max: Vec3::new(15.0, 15.0, 8.0),
        },
        obstacles: vec![obstacle],
        target,
    };
    let shot = ArcShotSpec {
        start: at(a0, radius, z0),
        end: at(a1, radius, z1),
        target,
        direction,
        sample_count: DEFAULT_SAMPLE_COUNT,
    };
    (world, shot)
}
