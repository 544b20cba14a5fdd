//! File-driven front end for arc-shot planning: interchange file schemas,
//! the plan/execute/bench/render commands, and SVG output.

pub mod bench;
pub mod commands;
pub mod error;
pub mod files;
pub mod render;

pub use error::CliError;
