//! Camera-path planning for aerial cinematography.
//!
//! The pipeline generates a target-facing arc shot, finds the sections an
//! obstacle blocks, repairs each one with a windowed anytime RRT*, and splices
//! the repairs back into the shot. A kinematic follower replays the result.

pub mod discontinuity;
pub mod error;
pub mod executor;
pub mod local_planner;
pub mod pipeline;
pub mod scenarios;
pub mod shot;
pub mod world;

pub use discontinuity::{find_discontinuities, Discontinuity};
pub use error::{Error, Result};
pub use executor::{command_for, follow, FollowConfig, SimState, VelocityCommand};
pub use local_planner::{plan_local, rrt_star, LocalPath, RrtParams, SearchWindow, Tree};
pub use pipeline::{plan_shot, validate, PlanReport, PlanResult};
pub use shot::{face_target, generate_arc, ArcShotSpec, Direction, GlobalPath, Pose4};
pub use world::{inflate, is_free, segment_free, AxisBox, Obstacle, QuadModel, Vec3, World};
