use std::path::PathBuf;

use thiserror::Error;
use workbench_core::anomaly::AnomalyError;
use workbench_core::hodge::HodgeError;
use workbench_core::mirror::MirrorError;
use workbench_core::picard_fuchs::PfError;

#[derive(Debug, Error)]
pub enum WorkbenchError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("cannot access {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("missing artifact {}", .0.display())]
    MissingArtifact(PathBuf),
    #[error("stage {stage}: {message}")]
    Math { stage: &'static str, message: String },
    #[error("stage {stage}: {message}")]
    Numeric { stage: &'static str, message: String },
}

pub type Result<T, E = WorkbenchError> = std::result::Result<T, E>;

impl WorkbenchError {
    /// 0 success, 1 configuration, 2 mathematical precondition, 3 numeric tolerance.
    pub fn exit_code(&self) -> i32 {
        match self {
            WorkbenchError::Config(_) | WorkbenchError::Io { .. } | WorkbenchError::MissingArtifact(_) => 1,
            WorkbenchError::Math { .. } => 2,
            WorkbenchError::Numeric { .. } => 3,
        }
    }

    pub fn stage(&self) -> Option<&'static str> {
        match self {
            WorkbenchError::Math { stage, .. } | WorkbenchError::Numeric { stage, .. } => Some(stage),
            _ => None,
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        WorkbenchError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn from_pf(stage: &'static str, e: PfError) -> Self {
        WorkbenchError::Math {
            stage,
            message: e.to_string(),
        }
    }

    pub fn from_mirror(stage: &'static str, e: MirrorError) -> Self {
        match e {
            MirrorError::InvalidConfig(m) => WorkbenchError::Config(m),
            MirrorError::Hodge(h) => Self::from_hodge(stage, h),
            MirrorError::Anomaly(a) => Self::from_anomaly(stage, a),
            other => WorkbenchError::Math {
                stage,
                message: other.to_string(),
            },
        }
    }

    pub fn from_hodge(stage: &'static str, e: HodgeError) -> Self {
        let message = e.to_string();
        match e {
            HodgeError::SignViolation { .. } | HodgeError::PrecisionLoss { .. } => {
                WorkbenchError::Numeric { stage, message }
            }
            HodgeError::InvalidGrid(_) => WorkbenchError::Config(message),
            _ => WorkbenchError::Math { stage, message },
        }
    }

    pub fn from_anomaly(stage: &'static str, e: AnomalyError) -> Self {
        let message = e.to_string();
        match e {
            AnomalyError::InvalidGrid(_) | AnomalyError::MissingField(_) | AnomalyError::BoundaryPoint { .. } => {
                WorkbenchError::Config(message)
            }
            AnomalyError::NoConvergence { .. } | AnomalyError::ResidualTooLarge { .. } => {
                WorkbenchError::Numeric { stage, message }
            }
            _ => WorkbenchError::Math { stage, message },
        }
    }
}
