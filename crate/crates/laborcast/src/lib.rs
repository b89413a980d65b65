//! Replication harness around `laborcast-core`: CSV series, a TOML data
//! catalog, versioned run configs and model files, and the commands behind
//! the `laborcast` binary.

pub mod catalog;
pub mod config;
pub mod csvio;
pub mod error;
pub mod modelfile;
pub mod montecarlo;
pub mod pipeline;
pub mod report;

pub use error::{AppError, ErrorKind, Result};
pub use pipeline::{write_outputs, Command, Output, Session, SessionOptions};
