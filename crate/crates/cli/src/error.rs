use std::fmt;

use latticewave::decayfit::FitError;
use latticewave::dispersion::DispersionError;
use latticewave::evolve::EvolveError;
use latticewave::oscquad::QuadError;
use latticewave::polynewton::{ParseError, PolyError};

/// Failures mapped onto the process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or inputs (exit 2).
    Validation(String),
    /// Budget exhausted, no convergence, blow-up or a failed check (exit 3).
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Failure(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "error: {m}"),
            CliError::Failure(m) => write!(f, "failure: {m}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Validation(format!("i/o: {e}"))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Validation(format!("json: {e}"))
    }
}

impl From<QuadError> for CliError {
    fn from(e: QuadError) -> Self {
        match e {
            QuadError::InvalidInput(_) => CliError::Validation(e.to_string()),
            _ => CliError::Failure(e.to_string()),
        }
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        match e {
            FitError::Quad(q) => q.into(),
            other => CliError::Validation(other.to_string()),
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        match e {
            PolyError::TooLarge(_) => CliError::Failure(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ParseError> for CliError {
    fn from(e: ParseError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<DispersionError> for CliError {
    fn from(e: DispersionError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<EvolveError> for CliError {
    fn from(e: EvolveError) -> Self {
        match e {
            EvolveError::Blowup { .. } => CliError::Failure(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
