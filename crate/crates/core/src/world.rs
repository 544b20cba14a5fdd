//! Environment model: bounded volume, static obstacles, the filming target,
//! and the collision queries every planning stage is built on.
//!
//! Obstacles are stored raw. Collision checks run against obstacles grown by
//! the vehicle's bounding radius plus a safety margin, so the vehicle itself
//! can be treated as a point.

use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{ensure, ensure_positive, Error, Result};

/// A point or displacement in the world frame, meters, z up.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Vec3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Vec3 {
    pub const ZERO: Vec3 = Vec3::new(0.0, 0.0, 0.0);

    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Vec3 { x, y, z }
    }

    pub fn splat(v: f64) -> Self {
        Vec3::new(v, v, v)
    }

    pub fn dot(self, other: Vec3) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm_squared(self) -> f64 {
        self.dot(self)
    }

    pub fn norm(self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(self, other: Vec3) -> f64 {
        (other - self).norm()
    }

    /// Length of the projection onto the xy-plane.
    pub fn horizontal_norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    /// Linear interpolation, `t = 0` gives `self`, `t = 1` gives `other`.
    pub fn lerp(self, other: Vec3, t: f64) -> Vec3 {
        self + (other - self) * t
    }

    pub fn min(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x.min(other.x), self.y.min(other.y), self.z.min(other.z))
    }

    pub fn max(self, other: Vec3) -> Vec3 {
        Vec3::new(self.x.max(other.x), self.y.max(other.y), self.z.max(other.z))
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    fn all_lt(self, other: Vec3) -> bool {
        self.x < other.x && self.y < other.y && self.z < other.z
    }

    fn all_le(self, other: Vec3) -> bool {
        self.x <= other.x && self.y <= other.y && self.z <= other.z
    }
}

impl Add for Vec3 {
    type Output = Vec3;
    fn add(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl Sub for Vec3 {
    type Output = Vec3;
    fn sub(self, rhs: Vec3) -> Vec3 {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl Mul<f64> for Vec3 {
    type Output = Vec3;
    fn mul(self, rhs: f64) -> Vec3 {
        Vec3::new(self.x * rhs, self.y * rhs, self.z * rhs)
    }
}

impl Neg for Vec3 {
    type Output = Vec3;
    fn neg(self) -> Vec3 {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

/// Axis-aligned box. Used both as an obstacle shape and as a region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    pub min: Vec3,
    pub max: Vec3,
}

impl AxisBox {
    /// Builds a box, rejecting non-finite corners or `min > max` on any axis.
    /// Zero extent is allowed (degenerate regions are legal search windows).
    pub fn new(min: Vec3, max: Vec3) -> Result<Self> {
        if !min.is_finite() || !max.is_finite() {
            return Err(Error::InvalidInput("box corners must be finite".into()));
        }
        if !min.all_le(max) {
            return Err(Error::InvalidInput(format!(
                "box min {min:?} exceeds max {max:?}"
            )));
        }
        Ok(AxisBox { min, max })
    }

    /// Smallest box containing both points.
    pub fn spanning(a: Vec3, b: Vec3) -> Self {
        AxisBox {
            min: a.min(b),
            max: a.max(b),
        }
    }

    pub fn center(&self) -> Vec3 {
        (self.min + self.max) * 0.5
    }

    pub fn half_extents(&self) -> Vec3 {
        (self.max - self.min) * 0.5
    }

    pub fn has_volume(&self) -> bool {
        self.min.all_lt(self.max)
    }

    /// Closed containment.
    pub fn contains(&self, p: Vec3) -> bool {
        self.min.all_le(p) && p.all_le(self.max)
    }

    pub fn contains_box(&self, other: &AxisBox) -> bool {
        self.contains(other.min) && self.contains(other.max)
    }

    pub fn grown(&self, amount: f64) -> AxisBox {
        let d = Vec3::splat(amount);
        AxisBox {
            min: self.min - d,
            max: self.max + d,
        }
    }

    /// Intersection with `bounds`. A box lying entirely outside collapses onto
    /// the nearest face of `bounds` instead of inverting.
    pub fn clamped_to(&self, bounds: &AxisBox) -> AxisBox {
        let clamp = |p: Vec3| p.max(bounds.min).min(bounds.max);
        AxisBox {
            min: clamp(self.min),
            max: clamp(self.max),
        }
    }

    /// Euclidean distance from `p` to the box surface or interior (0 inside).
    pub fn distance_to(&self, p: Vec3) -> f64 {
        let outside = (self.min - p).max(p - self.max).max(Vec3::ZERO);
        outside.norm()
    }
}

/// A static obstacle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstacle {
    /// Vertical cylinder standing on `base_center`.
    Cylinder {
        base_center: Vec3,
        radius: f64,
        height: f64,
    },
    #[serde(rename = "box")]
    AxisBox { min: Vec3, max: Vec3 },
}

impl Obstacle {
    pub fn cylinder(base_center: Vec3, radius: f64, height: f64) -> Result<Self> {
        let o = Obstacle::Cylinder {
            base_center,
            radius,
            height,
        };
        o.validate()?;
        Ok(o)
    }

    pub fn axis_box(min: Vec3, max: Vec3) -> Result<Self> {
        let o = Obstacle::AxisBox { min, max };
        o.validate()?;
        Ok(o)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            Obstacle::Cylinder {
                base_center,
                radius,
                height,
            } => {
                ensure(base_center.is_finite(), "base", || "must be finite".into())?;
                ensure_positive("radius", radius)?;
                ensure_positive("height", height)
            }
            Obstacle::AxisBox { min, max } => {
                ensure(min.is_finite() && max.is_finite(), "min", || "corners must be finite".into())?;
                ensure(min.all_lt(max), "max", || {
                    format!("must exceed min {min:?} on every axis, got {max:?}")
                })
            }
        }
    }

    /// Closed point-in-obstacle test.
    pub fn contains(&self, p: Vec3) -> bool {
        match *self {
            Obstacle::Cylinder {
                base_center,
                radius,
                height,
            } => {
                let dx = p.x - base_center.x;
                let dy = p.y - base_center.y;
                dx * dx + dy * dy <= radius * radius
                    && p.z >= base_center.z
                    && p.z <= base_center.z + height
            }
            Obstacle::AxisBox { min, max } => AxisBox { min, max }.contains(p),
        }
    }

    /// Euclidean distance from `p` to the solid (0 inside).
    pub fn distance_to(&self, p: Vec3) -> f64 {
        match *self {
            Obstacle::Cylinder {
                base_center,
                radius,
                height,
            } => {
                let radial = ((p.x - base_center.x).hypot(p.y - base_center.y) - radius).max(0.0);
                let below = base_center.z - p.z;
                let above = p.z - (base_center.z + height);
                let vertical = below.max(above).max(0.0);
                radial.hypot(vertical)
            }
            Obstacle::AxisBox { min, max } => AxisBox { min, max }.distance_to(p),
        }
    }

    /// Horizontal footprint as an axis-aligned box (for rendering and scene setup).
    pub fn footprint(&self) -> AxisBox {
        match *self {
            Obstacle::Cylinder {
                base_center,
                radius,
                height,
            } => AxisBox {
                min: Vec3::new(base_center.x - radius, base_center.y - radius, base_center.z),
                max: Vec3::new(
                    base_center.x + radius,
                    base_center.y + radius,
                    base_center.z + height,
                ),
            },
            Obstacle::AxisBox { min, max } => AxisBox { min, max },
        }
    }
}

/// Bounding-sphere vehicle model and its motion limits.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadModel {
    pub body_radius: f64,
    pub safety_margin: f64,
    pub max_speed: f64,
    pub max_yaw_rate: f64,
}

impl Default for QuadModel {
    fn default() -> Self {
        QuadModel {
            body_radius: 0.3,
            safety_margin: 0.2,
            max_speed: 2.0,
            max_yaw_rate: 1.5,
        }
    }
}

impl QuadModel {
    pub fn validate(&self) -> Result<()> {
        ensure_positive("body_radius", self.body_radius)?;
        ensure(
            self.safety_margin >= 0.0 && self.safety_margin.is_finite(),
            "safety_margin",
            || format!("must be non-negative, got {}", self.safety_margin),
        )?;
        ensure_positive("max_speed", self.max_speed)?;
        ensure_positive("max_yaw_rate", self.max_yaw_rate)
    }

    /// Amount every obstacle grows by in c-space.
    pub fn inflation(&self) -> f64 {
        self.body_radius + self.safety_margin
    }

    /// Default sampling step for segment checks: half the body radius, the
    /// same step the final path validation uses.
    pub fn collision_step(&self) -> f64 {
        self.body_radius / 2.0
    }
}

/// Grows `o` by the vehicle radius plus margin. Cylinders keep their base.
pub fn inflate(o: &Obstacle, q: &QuadModel) -> Obstacle {
    grow_by(o, q.inflation())
}

/// Grows `o` by `amount`; the same rule [`inflate`] applies.
pub fn grow_by(o: &Obstacle, amount: f64) -> Obstacle {
    match *o {
        Obstacle::Cylinder {
            base_center,
            radius,
            height,
        } => Obstacle::Cylinder {
            base_center,
            radius: radius + amount,
            height: height + amount,
        },
        Obstacle::AxisBox { min, max } => Obstacle::AxisBox {
            min: min - Vec3::splat(amount),
            max: max + Vec3::splat(amount),
        },
    }
}

/// The planning environment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct World {
    pub bounds: AxisBox,
    pub obstacles: Vec<Obstacle>,
    pub target: Vec3,
}

impl World {
    pub fn new(bounds: AxisBox, obstacles: Vec<Obstacle>, target: Vec3) -> Result<Self> {
        let w = World {
            bounds,
            obstacles,
            target,
        };
        w.validate()?;
        Ok(w)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.bounds.has_volume() {
            return Err(Error::InvalidInput(
                "world bounds must have min < max on every axis".into(),
            ));
        }
        for o in &self.obstacles {
            o.validate()?;
        }
        if !self.bounds.contains(self.target) {
            return Err(Error::InvalidInput(format!(
                "target {:?} lies outside world bounds",
                self.target
            )));
        }
        Ok(())
    }

    /// Obstacles grown for `q`, in the same order as [`World::obstacles`].
    pub fn inflated_obstacles(&self, q: &QuadModel) -> Vec<Obstacle> {
        self.obstacles.iter().map(|o| inflate(o, q)).collect()
    }

    /// True when `p` is inside the bounds and clear of every obstacle grown by
    /// `clearance`. Obstacle boundaries count as collisions.
    pub fn is_clear(&self, p: Vec3, clearance: f64) -> bool {
        self.bounds.contains(p)
            && !self
                .obstacles
                .iter()
                .any(|o| grow_by(o, clearance).contains(p))
    }
}

/// Point collision check against the c-space (inflated) obstacles.
pub fn is_free(w: &World, q: &QuadModel, p: Vec3) -> bool {
    w.is_clear(p, q.inflation())
}

/// Number of sub-intervals used to sample a segment of `length` at `step`.
pub fn segment_subdivisions(length: f64, step: f64) -> usize {
    ((length / step).ceil() as usize).max(1)
}

/// Sampled segment check: `a`, `b` and evenly spaced interior points no more
/// than `step` apart must all be free.
pub fn segment_free(w: &World, q: &QuadModel, a: Vec3, b: Vec3, step: f64) -> bool {
    debug_assert!(step > 0.0);
    let n = segment_subdivisions(a.distance(b), step);
    (0..=n).all(|i| {
        let p = if i == n { b } else { a.lerp(b, i as f64 / n as f64) };
        is_free(w, q, p)
    })
}
