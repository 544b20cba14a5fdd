//! Interchange file schemas: world, shot, config, bench and path files.
//!
//! Every file is JSON with a top-level `"version"` field. Points are written
//! as `[x, y, z]` arrays. Loading reports the JSON path of the offending field
//! for both syntax and invariant violations.

use std::fs;
use std::path::Path;

use arcshot_core::executor::FollowConfig;
use arcshot_core::shot::DEFAULT_SAMPLE_COUNT;
use arcshot_core::{
    ArcShotSpec, AxisBox, Direction, GlobalPath, Obstacle, Pose4, QuadModel, RrtParams, SimState, Vec3, World,
};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Point = [f64; 3];

fn vec3(p: Point) -> Vec3 {
    Vec3::new(p[0], p[1], p[2])
}

fn point(v: Vec3) -> Point {
    [v.x, v.y, v.z]
}

fn check_version(field: &str, version: u32) -> Result<(), CliError> {
    if version != SCHEMA_VERSION {
        return Err(CliError::invalid(
            field,
            format!("unsupported schema version {version}, expected {SCHEMA_VERSION}"),
        ));
    }
    Ok(())
}

/// Parses JSON text into `T`, naming the failing field on error.
pub fn parse<T: DeserializeOwned>(text: &str, source: &str) -> Result<T, CliError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        CliError::Parse {
            source: source.to_string(),
            field: if path == "." { String::new() } else { path },
            message: e.into_inner().to_string(),
        }
    })
}

pub fn read<T: DeserializeOwned>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })?;
    parse(&text, &path.display().to_string())
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("serializable value");
    s.push('\n');
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundsSpec {
    pub min: Point,
    pub max: Point,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum ObstacleSpec {
    Cylinder { base: Point, radius: f64, height: f64 },
    Box { min: Point, max: Point },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldFile {
    pub version: u32,
    pub bounds: BoundsSpec,
    pub target: Point,
    #[serde(default)]
    pub obstacles: Vec<ObstacleSpec>,
}

impl WorldFile {
    pub fn from_world(w: &World) -> Self {
        WorldFile {
            version: SCHEMA_VERSION,
            bounds: BoundsSpec {
                min: point(w.bounds.min),
                max: point(w.bounds.max),
            },
            target: point(w.target),
            obstacles: w
                .obstacles
                .iter()
                .map(|o| match *o {
                    Obstacle::Cylinder {
                        base_center,
                        radius,
                        height,
                    } => ObstacleSpec::Cylinder {
                        base: point(base_center),
                        radius,
                        height,
                    },
                    Obstacle::AxisBox { min, max } => ObstacleSpec::Box {
                        min: point(min),
                        max: point(max),
                    },
                })
                .collect(),
        }
    }

    pub fn into_world(self) -> Result<World, CliError> {
        check_version("version", self.version)?;
        let bounds = AxisBox {
            min: vec3(self.bounds.min),
            max: vec3(self.bounds.max),
        };
        if !(bounds.min.is_finite() && bounds.max.is_finite() && bounds.has_volume()) {
            return Err(CliError::invalid(
                "bounds",
                "min must be below max on every axis".into(),
            ));
        }
        let mut obstacles = Vec::with_capacity(self.obstacles.len());
        for (i, o) in self.obstacles.into_iter().enumerate() {
            let obstacle = match o {
                ObstacleSpec::Cylinder {
                    base,
                    radius,
                    height,
                } => Obstacle::Cylinder {
                    base_center: vec3(base),
                    radius,
                    height,
                },
                ObstacleSpec::Box { min, max } => Obstacle::AxisBox {
                    min: vec3(min),
                    max: vec3(max),
                },
            };
            obstacle
                .validate()
                .map_err(|e| CliError::in_section(&format!("obstacles[{i}]"), e))?;
            obstacles.push(obstacle);
        }
        let target = vec3(self.target);
        if !bounds.contains(target) {
            return Err(CliError::invalid("target", "target must lie inside bounds".into()));
        }
        Ok(World {
            bounds,
            obstacles,
            target,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotFile {
    pub version: u32,
    pub start: Point,
    pub end: Point,
    /// Defaults to the world's target.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub target: Option<Point>,
    pub direction: Direction,
    #[serde(default = "default_samples")]
    pub samples: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLE_COUNT
}

impl ShotFile {
    pub fn from_spec(s: &ArcShotSpec) -> Self {
        ShotFile {
            version: SCHEMA_VERSION,
            start: point(s.start),
            end: point(s.end),
            target: Some(point(s.target)),
            direction: s.direction,
            samples: s.sample_count,
        }
    }

    pub fn into_spec(self, world: &World) -> Result<ArcShotSpec, CliError> {
        check_version("version", self.version)?;
        let spec = ArcShotSpec {
            start: vec3(self.start),
            end: vec3(self.end),
            target: self.target.map_or(world.target, vec3),
            direction: self.direction,
            sample_count: self.samples,
        };
        if spec.sample_count < 2 {
            return Err(CliError::invalid("samples", "must be at least 2".into()));
        }
        for (field, p) in [("start", spec.start), ("end", spec.end)] {
            if !p.is_finite() {
                return Err(CliError::invalid(field, "must be finite".into()));
            }
            if (p - spec.target).horizontal_norm() == 0.0 {
                return Err(CliError::invalid(
                    field,
                    "must not be horizontally coincident with the target".into(),
                ));
            }
            if !world.bounds.contains(p) {
                return Err(CliError::invalid(field, "must lie inside the world bounds".into()));
            }
        }
        spec.validate()
            .map_err(|e| CliError::invalid("", e.to_string()))?;
        Ok(spec)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RenderOptions {
    /// Pixels per meter.
    pub scale: f64,
    pub overlay_tree: bool,
}

impl Default for RenderOptions {
    fn default() -> Self {
        RenderOptions {
            scale: 30.0,
            overlay_tree: false,
        }
    }
}

/// Run configuration. Every section and field is optional.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub version: u32,
    pub quad: QuadModel,
    pub rrt: RrtParams,
    pub follow: FollowConfig,
    /// Discontinuity padding in samples.
    pub margin: usize,
    /// Dense validation step; defaults to body_radius / 2.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub validation_step: Option<f64>,
    pub render: RenderOptions,
}

impl Default for ConfigFile {
    fn default() -> Self {
        ConfigFile {
            version: SCHEMA_VERSION,
            quad: QuadModel::default(),
            rrt: RrtParams::default(),
            follow: FollowConfig::default(),
            margin: arcshot_core::discontinuity::DEFAULT_MARGIN,
            validation_step: None,
            render: RenderOptions::default(),
        }
    }
}

impl ConfigFile {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version("version", self.version)?;
        self.quad.validate().map_err(|e| CliError::in_section("quad", e))?;
        self.rrt.validate().map_err(|e| CliError::in_section("rrt", e))?;
        self.follow.validate().map_err(|e| CliError::in_section("follow", e))?;
        if self.margin < 1 {
            return Err(CliError::invalid("margin", "must be at least 1".into()));
        }
        if let Some(step) = self.validation_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(CliError::invalid("validation_step", "must be positive".into()));
            }
        }
        if !(self.render.scale > 0.0 && self.render.scale.is_finite()) {
            return Err(CliError::invalid("render.scale", "must be positive".into()));
        }
        Ok(())
    }

    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let cfg: ConfigFile = match path {
            Some(p) => read(p)?,
            None => ConfigFile::default(),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BenchFile {
    pub version: u32,
    pub loops: Vec<usize>,
    pub repetitions: usize,
}

impl BenchFile {
    pub fn validate(&self) -> Result<(), CliError> {
        check_version("version", self.version)?;
        if self.loops.is_empty() {
            return Err(CliError::invalid("loops", "must list at least one value".into()));
        }
        if let Some(i) = self.loops.iter().position(|&l| l < 1) {
            return Err(CliError::invalid(&format!("loops[{i}]"), "must be at least 1".into()));
        }
        if self.repetitions < 1 {
            return Err(CliError::invalid("repetitions", "must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PoseRecord {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    pub yaw: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<f64>,
}

/// Path or trajectory log. Trajectories carry a time on every pose.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathFile {
    pub version: u32,
    pub poses: Vec<PoseRecord>,
}

impl PathFile {
    pub fn from_path(p: &GlobalPath) -> Self {
        PathFile {
            version: SCHEMA_VERSION,
            poses: p
                .poses
                .iter()
                .map(|pose| PoseRecord {
                    x: pose.position.x,
                    y: pose.position.y,
                    z: pose.position.z,
                    yaw: pose.yaw,
                    t: None,
                })
                .collect(),
        }
    }

    pub fn from_log(log: &[SimState]) -> Self {
        PathFile {
            version: SCHEMA_VERSION,
            poses: log
                .iter()
                .map(|s| PoseRecord {
                    x: s.position.x,
                    y: s.position.y,
                    z: s.position.z,
                    yaw: s.yaw,
                    t: Some(s.time),
                })
                .collect(),
        }
    }

    /// Converts to a path, keeping yaw values bit-exact.
    pub fn into_path(self) -> Result<GlobalPath, CliError> {
        check_version("version", self.version)?;
        if self.poses.is_empty() {
            return Err(CliError::invalid("poses", "must contain at least one pose".into()));
        }
        let mut poses = Vec::with_capacity(self.poses.len());
        for (i, r) in self.poses.into_iter().enumerate() {
            let position = Vec3::new(r.x, r.y, r.z);
            if !position.is_finite() || !r.yaw.is_finite() {
                return Err(CliError::invalid(&format!("poses[{i}]"), "values must be finite".into()));
            }
            poses.push(Pose4 { position, yaw: r.yaw });
        }
        Ok(GlobalPath::from_poses(poses))
    }

    pub fn into_log(self) -> Result<Vec<SimState>, CliError> {
        check_version("version", self.version)?;
        self.poses
            .into_iter()
            .enumerate()
            .map(|(i, r)| {
                Ok(SimState {
                    position: Vec3::new(r.x, r.y, r.z),
                    yaw: r.yaw,
                    time: r
                        .t
                        .ok_or_else(|| CliError::invalid(&format!("poses[{i}].t"), "trajectory poses need a time".into()))?,
                })
            })
            .collect()
    }
}
