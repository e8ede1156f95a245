use std::path::PathBuf;

use thiserror::Error;

use crate::topology::{RsuId, VehicleId};

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown vehicle {0}")]
    UnknownVehicle(VehicleId),

    #[error("unknown rsu {0}")]
    UnknownRsu(RsuId),

    #[error("invalid link distance {0} m (must be > 0)")]
    InvalidLink(f64),

    #[error("dead link: rate {0} bps cannot carry a packet")]
    DeadLink(f64),

    #[error("contract violation: {0}")]
    ContractViolation(String),

    #[error("malformed config {path}: {source}")]
    ConfigParse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("malformed results file: {0}")]
    ResultsParse(String),

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
