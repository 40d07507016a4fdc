use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Solver(#[from] odenet::Error),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(odenet::Error::NonFiniteLoss { .. }) => 3,
            CliError::Solver(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

/// Short machine-readable tag for a failed benchmark or sweep row.
pub fn status_tag(err: &odenet::Error) -> &'static str {
    use odenet::Error::*;
    match err {
        NonFiniteLoss { .. } => "diverged",
        UnsupportedConditions(_) => "unsupported_conditions",
        BadParameter(_) => "bad_parameter",
        DomainViolation(_) => "domain_violation",
        DegenerateDenominator { .. } | DuplicatePoint { .. } | InvalidConstraint(_) | BadConditionCount { .. } => {
            "bad_constraints"
        }
        _ => "error",
    }
}
