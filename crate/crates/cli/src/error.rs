use std::path::PathBuf;

use billiards_core::alcove::AlcoveError;
use billiards_core::corner::CornerError;
use billiards_core::dynamics::DynamicsError;
use billiards_core::smooth::SmoothError;
use billiards_core::surface::SurfaceError;
use billiards_core::PolytopeError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Ambiguous(String),
    #[error("{0}")]
    Budget(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    /// 2 for bad input, 3 for an ambiguous corner, 4 for an exhausted budget.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) | CliError::Io { .. } => 2,
            CliError::Ambiguous(_) => 3,
            CliError::Budget(_) => 4,
        }
    }

    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }
}

impl From<DynamicsError> for CliError {
    fn from(e: DynamicsError) -> Self {
        match e {
            DynamicsError::CornerAmbiguous { .. } => CliError::Ambiguous(e.to_string()),
            DynamicsError::BounceBudgetExceeded { .. } | DynamicsError::NoProgress => {
                CliError::Budget(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<AlcoveError> for CliError {
    fn from(e: AlcoveError) -> Self {
        match e {
            AlcoveError::WordBudgetExceeded(_) => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SurfaceError> for CliError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::VertexHit { .. } => CliError::Ambiguous(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<SmoothError> for CliError {
    fn from(e: SmoothError) -> Self {
        match e {
            SmoothError::RootSearch(_) => CliError::Budget(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<PolytopeError> for CliError {
    fn from(e: PolytopeError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<CornerError> for CliError {
    fn from(e: CornerError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Input(format!("malformed JSON: {e}"))
    }
}
