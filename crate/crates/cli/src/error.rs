use std::fmt;

use arcshot_core::Error as PlanError;
use serde_json::{json, Value};

/// Process exit codes. Clap reserves 2 for usage errors.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INTERNAL: i32 = 1;
    pub const PARSE: i32 = 3;
    pub const INVALID: i32 = 4;
    pub const ENDPOINT_BLOCKED: i32 = 5;
    pub const LOCAL_PLAN_FAILED: i32 = 6;
    pub const VALIDATION_FAILED: i32 = 7;
    pub const TIMEOUT: i32 = 8;
    pub const VACUOUS_BENCH: i32 = 9;
}

#[derive(Debug)]
pub enum CliError {
    Io { path: String, message: String },
    Parse { source: String, field: String, message: String },
    Invalid { field: String, message: String },
    Plan(PlanError),
    VacuousBench,
}

impl CliError {
    pub fn invalid(field: &str, message: String) -> Self {
        CliError::Invalid {
            field: field.to_string(),
            message,
        }
    }

    /// Invariant violation inside config `section`, keeping the field name
    /// when the core error carries one.
    pub fn in_section(section: &str, e: PlanError) -> Self {
        match e {
            PlanError::InvalidParam { field, reason } => CliError::Invalid {
                field: format!("{section}.{field}"),
                message: reason,
            },
            other => CliError::invalid(section, other.to_string()),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => exit::INTERNAL,
            CliError::Parse { .. } => exit::PARSE,
            CliError::Invalid { .. } => exit::INVALID,
            CliError::VacuousBench => exit::VACUOUS_BENCH,
            CliError::Plan(e) => match e {
                PlanError::InvalidInput(_)
                | PlanError::InvalidParam { .. }
                | PlanError::DegenerateArc
                | PlanError::DegenerateHeading => exit::INVALID,
                PlanError::EndpointBlocked { .. } | PlanError::UnresolvableSpan { .. } => exit::ENDPOINT_BLOCKED,
                PlanError::LocalPlanFailed { .. } => exit::LOCAL_PLAN_FAILED,
                PlanError::ValidationFailed { .. } => exit::VALIDATION_FAILED,
                PlanError::TimeoutExceeded { .. } => exit::TIMEOUT,
                PlanError::DegenerateExtend | PlanError::SpliceMismatch { .. } => exit::INTERNAL,
            },
        }
    }

    fn kind(&self) -> &'static str {
        match self {
            CliError::Io { .. } => "Io",
            CliError::Parse { .. } => "ParseError",
            CliError::Invalid { .. } => "ValidationError",
            CliError::VacuousBench => "VacuousBench",
            CliError::Plan(e) => match e {
                PlanError::InvalidInput(_) | PlanError::InvalidParam { .. } => "ValidationError",
                PlanError::DegenerateHeading => "DegenerateHeading",
                PlanError::DegenerateArc => "DegenerateArc",
                PlanError::EndpointBlocked { .. } => "EndpointBlocked",
                PlanError::UnresolvableSpan { .. } => "UnresolvableSpan",
                PlanError::DegenerateExtend => "DegenerateExtend",
                PlanError::LocalPlanFailed { .. } => "LocalPlanFailed",
                PlanError::SpliceMismatch { .. } => "SpliceMismatch",
                PlanError::ValidationFailed { .. } => "ValidationFailed",
                PlanError::TimeoutExceeded { .. } => "TimeoutExceeded",
            },
        }
    }

    /// Machine-readable error object.
    pub fn to_json(&self) -> Value {
        let mut obj = json!({
            "kind": self.kind(),
            "code": self.exit_code(),
            "message": self.to_string(),
        });
        let extra = match self {
            CliError::Io { path, .. } => json!({ "path": path }),
            CliError::Parse { source, field, .. } => json!({ "file": source, "field": field }),
            CliError::Invalid { field, .. } => json!({ "field": field }),
            CliError::Plan(PlanError::EndpointBlocked { index }) => json!({ "index": index }),
            CliError::Plan(PlanError::LocalPlanFailed { discontinuity, attempts }) => {
                json!({ "discontinuity": discontinuity, "attempts": attempts })
            }
            CliError::Plan(PlanError::ValidationFailed { segment }) => json!({ "segment": segment }),
            CliError::Plan(PlanError::TimeoutExceeded { max_time, log }) => {
                json!({ "max_time": max_time, "logged_states": log.len() })
            }
            _ => json!({}),
        };
        if let (Value::Object(o), Value::Object(e)) = (&mut obj, extra) {
            o.extend(e);
        }
        json!({ "error": obj })
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, message } => write!(f, "{path}: {message}"),
            CliError::Parse { source, field, message } if field.is_empty() => write!(f, "{source}: {message}"),
            CliError::Parse { source, field, message } => write!(f, "{source}: at `{field}`: {message}"),
            CliError::Invalid { field, message } if field.is_empty() => write!(f, "{message}"),
            CliError::Invalid { field, message } => write!(f, "`{field}`: {message}"),
            CliError::Plan(e) => write!(f, "{e}"),
            CliError::VacuousBench => write!(f, "scenario has no discontinuity; nothing to benchmark"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<PlanError> for CliError {
    fn from(e: PlanError) -> Self {
        CliError::Plan(e)
    }
}
