//! Exit-code mapping and the machine-readable stderr error line.
//!
//! Contract: 0 success, 1 domain failure (infeasible geometry, no piping
//! solution, failed batch), 2 usage or configuration error. Every failure
//! prints exactly one JSON line on stderr.

use std::fmt;

use pbrkit_core::assembly::AssemblyError;
use pbrkit_core::config::ConfigError;
use pbrkit_core::geom::GeomError;
use pbrkit_core::piping::PipingError;
use pbrkit_core::regression::RegressionError;
use pbrkit_core::similarity::SimilarityError;
use pbrkit_core::vision::VisionError;

#[derive(Debug)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "config",
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn usage(message: impl Into<String>) -> Self {
        CliError {
            kind: "usage",
            message: message.into(),
            exit_code: 2,
        }
    }

    pub fn domain(kind: &'static str, message: impl Into<String>) -> Self {
        CliError {
            kind,
            message: message.into(),
            exit_code: 1,
        }
    }

    /// One-line JSON for scripted consumers.
    pub fn machine_line(&self) -> String {
        serde_json::json!({
            "error": self.kind,
            "exit": self.exit_code,
            "message": self.message,
        })
        .to_string()
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::config(e.to_string())
    }
}

impl From<GeomError> for CliError {
    fn from(e: GeomError) -> Self {
        CliError::domain("geometry", e.to_string())
    }
}

impl From<AssemblyError> for CliError {
    fn from(e: AssemblyError) -> Self {
        CliError::domain("assembly", e.to_string())
    }
}

impl From<PipingError> for CliError {
    fn from(e: PipingError) -> Self {
        CliError::domain("piping", e.to_string())
    }
}

impl From<VisionError> for CliError {
    fn from(e: VisionError) -> Self {
        CliError::domain("vision", e.to_string())
    }
}

impl From<RegressionError> for CliError {
    fn from(e: RegressionError) -> Self {
        CliError::domain("regression", e.to_string())
    }
}

impl From<SimilarityError> for CliError {
    fn from(e: SimilarityError) -> Self {
        CliError::domain("similarity", e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::domain("io", e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::domain("csv", e.to_string())
    }
}
