use std::path::PathBuf;

use serde::Serialize;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] ocsvm_rules::Error),

    #[error("config error: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("{0}")]
    Other(String),
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const OTHER: i32 = 1;
    pub const CONFIG: i32 = 2;
    pub const INSUFFICIENT_DATA: i32 = 3;
    pub const NOT_CONVERGED: i32 = 4;
}

/// Machine-readable form of a failure, written to stderr and `error.json`.
#[derive(Debug, Clone, Serialize)]
pub struct ErrorReport {
    pub kind: &'static str,
    pub exit_code: i32,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub details: Option<serde_json::Value>,
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io {
            path: path.into(),
            source,
        }
    }

    pub fn json(path: impl Into<PathBuf>, source: serde_json::Error) -> Self {
        Self::Json {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> &'static str {
        use ocsvm_rules::Error as E;
        match self {
            CliError::Config(_) => "config",
            CliError::Core(E::Schema(_) | E::UnknownColumn(_) | E::InvalidParameter(_)) => "config",
            CliError::Core(E::InsufficientData { .. }) => "insufficient_data",
            CliError::Core(E::NotConverged { .. } | E::ExtractionNotConverged { .. }) => "not_converged",
            CliError::Core(E::Parse { .. } | E::Csv(_) | E::Empty(_)) => "data",
            CliError::Io { .. } | CliError::Core(E::Io(_)) => "io",
            CliError::Json { .. } => "json",
            _ => "other",
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            "config" => exit::CONFIG,
            "insufficient_data" => exit::INSUFFICIENT_DATA,
            "not_converged" => exit::NOT_CONVERGED,
            _ => exit::OTHER,
        }
    }

    pub fn report(&self) -> ErrorReport {
        use ocsvm_rules::Error as E;
        let details = match self {
            CliError::Core(E::InsufficientData { required, available }) => {
                Some(serde_json::json!({ "required": required, "available": available }))
            }
            CliError::Core(E::NotConverged {
                iterations,
                violation,
                rho,
                ..
            }) => Some(serde_json::json!({ "iterations": iterations, "violation": violation, "rho": rho })),
            CliError::Core(E::ExtractionNotConverged { clusters, offending }) => {
                Some(serde_json::json!({ "clusters": clusters, "offending_boxes": offending }))
            }
            _ => None,
        };
        ErrorReport {
            kind: self.kind(),
            exit_code: self.exit_code(),
            message: self.to_string(),
            details,
        }
    }
}
