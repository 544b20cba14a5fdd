use thiserror::Error;

use crate::executor::SimState;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{field}: {reason}")]
    InvalidParam { field: &'static str, reason: String },

    #[error("point is horizontally coincident with the target; heading is undefined")]
    DegenerateHeading,

    #[error("arc endpoint lies on the target axis (zero radius)")]
    DegenerateArc,

    #[error("path endpoint {index} is in collision")]
    EndpointBlocked { index: usize },

    #[error("no collision-free pose brackets the blocked run {first}..={last}")]
    UnresolvableSpan { first: usize, last: usize },

    #[error("cannot extend from a point toward itself")]
    DegenerateExtend,

    #[error("local planner failed on discontinuity {discontinuity} after {attempts} attempt(s)")]
    LocalPlanFailed { discontinuity: usize, attempts: u32 },

    #[error("local path endpoint is {offset:.3e} m away from the discontinuity's {end} pose")]
    SpliceMismatch { end: &'static str, offset: f64 },

    #[error("path segment {segment} is in collision")]
    ValidationFailed { segment: usize },

    #[error("follower did not reach the last waypoint within {max_time} s")]
    TimeoutExceeded { max_time: f64, log: Vec<SimState> },
}

pub(crate) fn ensure(ok: bool, field: &'static str, reason: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidParam { field, reason: reason() })
    }
}

pub(crate) fn ensure_positive(field: &'static str, v: f64) -> Result<()> {
    ensure(v > 0.0 && v.is_finite(), field, || format!("must be positive, got {v}"))
}
