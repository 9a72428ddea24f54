use std::process::ExitCode;

use sigmaball::maps::MapError;
use sigmaball::model::ModelError;
use sigmaball::norms::NormError;
use sigmaball::ramsey::RamseyError;
use thiserror::Error;

/// A command failure, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0:#}")]
    Usage(#[from] anyhow::Error),
    #[error("domain violation: {0}")]
    Domain(String),
    #[error("guard exceeded: {0}")]
    Guard(String),
    #[error("invariant failure: {0}")]
    Invariant(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Usage(_) => 1,
            Failure::Domain(_) => 2,
            Failure::Guard(_) => 3,
            Failure::Invariant(_) => 4,
        })
    }
}

fn is_guard(e: &MapError) -> bool {
    match e {
        MapError::ZGuardExceeded(_) | MapError::Model(ModelError::GuardExceeded { .. }) => true,
        MapError::Stage { source, .. } => is_guard(source),
        _ => false,
    }
}

impl From<MapError> for Failure {
    fn from(e: MapError) -> Self {
        if is_guard(&e) {
            Failure::Guard(e.to_string())
        } else {
            Failure::Domain(e.to_string())
        }
    }
}

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        MapError::from(e).into()
    }
}

impl From<NormError> for Failure {
    fn from(e: NormError) -> Self {
        Failure::Domain(e.to_string())
    }
}

impl From<RamseyError> for Failure {
    fn from(e: RamseyError) -> Self {
        match e {
            RamseyError::ExhaustiveTooLarge(_) | RamseyError::EsTooLong(_) => {
                Failure::Guard(e.to_string())
            }
            _ => Failure::Domain(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Usage(e.into())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Usage(e.into())
    }
}
