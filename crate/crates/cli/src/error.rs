use serde::Serialize;
use unrect_core::Error;

use crate::output::SCHEMA_VERSION;

pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_FAILED: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliError {
    pub kind: &'static str,
    pub message: String,
    pub exit_code: u8,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError {
            kind: "malformed_config",
            message: message.into(),
            exit_code: EXIT_CONFIG,
        }
    }

    pub fn failed(message: impl Into<String>) -> Self {
        CliError {
            kind: "check_failed",
            message: message.into(),
            exit_code: EXIT_FAILED,
        }
    }

    pub fn io(e: std::io::Error, path: &std::path::Path) -> Self {
        CliError {
            kind: "io",
            message: format!("{}: {e}", path.display()),
            exit_code: EXIT_CONFIG,
        }
    }

    /// The line written to stderr.
    pub fn to_json_line(&self) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            schema_version: u32,
            error: &'a CliError,
        }
        serde_json::to_string(&Line {
            schema_version: SCHEMA_VERSION,
            error: self,
        })
        .expect("error records serialize")
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let (kind, exit_code) = match &e {
            Error::BudgetExceeded { .. } => ("budget_exceeded", EXIT_BUDGET),
            Error::NotCertifiable { .. } => ("not_certifiable", EXIT_FAILED),
            Error::Precision { .. } => ("precision", EXIT_FAILED),
            Error::OutOfDomain { .. } => ("out_of_domain", EXIT_CONFIG),
            Error::LevelOutOfRange { .. } => ("level_out_of_range", EXIT_CONFIG),
            Error::LevelTooFine { .. } => ("level_too_fine", EXIT_BUDGET),
            Error::Precondition(_) => ("precondition", EXIT_CONFIG),
            Error::InvalidParams(_) => ("invalid_params", EXIT_CONFIG),
            Error::Parse(_) => ("parse", EXIT_CONFIG),
        };
        CliError {
            kind,
            message: e.to_string(),
            exit_code,
        }
    }
}
