use std::path::Path;

use laborcast_core::Error as CoreError;
use serde::Serialize;

/// Error classes, each with its own process exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorKind {
    Config,
    Data,
    Numeric,
}

impl ErrorKind {
    pub fn exit_code(self) -> i32 {
        match self {
            ErrorKind::Config => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}

#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct AppError {
    pub kind: ErrorKind,
    pub message: String,
}

pub type Result<T> = std::result::Result<T, AppError>;

impl AppError {
    pub fn config(message: impl Into<String>) -> Self {
        AppError { kind: ErrorKind::Config, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        AppError { kind: ErrorKind::Data, message: message.into() }
    }

    pub fn numeric(message: impl Into<String>) -> Self {
        AppError { kind: ErrorKind::Numeric, message: message.into() }
    }

    pub fn io(path: &Path, err: std::io::Error) -> Self {
        AppError::data(format!("{}: {err}", path.display()))
    }

    /// Prefixes the message with what was being done.
    pub fn context(mut self, what: impl std::fmt::Display) -> Self {
        self.message = format!("{what}: {}", self.message);
        self
    }

    /// Single-line JSON record for stderr.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Record<'a> {
            error: ErrorKind,
            exit_code: i32,
            message: &'a str,
        }
        serde_json::to_string(&Record { error: self.kind, exit_code: self.kind.exit_code(), message: &self.message })
            .expect("plain record serializes")
    }
}

impl From<CoreError> for AppError {
    fn from(e: CoreError) -> Self {
        let kind = match &e {
            CoreError::InvalidArgument(_) | CoreError::EmptyGrid => ErrorKind::Config,
            CoreError::RankDeficient { .. }
            | CoreError::Singular(_)
            | CoreError::DegenerateVariance(_)
            | CoreError::Numeric(_) => ErrorKind::Numeric,
            _ => ErrorKind::Data,
        };
        AppError { kind, message: e.to_string() }
    }
}

pub trait Context<T> {
    fn context(self, what: impl std::fmt::Display) -> Result<T>;
}

impl<T, E: Into<AppError>> Context<T> for std::result::Result<T, E> {
    fn context(self, what: impl std::fmt::Display) -> Result<T> {
        self.map_err(|e| e.into().context(what))
    }
}
