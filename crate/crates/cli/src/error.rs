use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{context}: {message}")]
    Data { context: String, message: String },
    #[error("{context}: {source}")]
    Compute {
        context: String,
        #[source]
        source: hfts_core::Error,
    },
    #[error("cannot read {}: {source}", path.display())]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot write {}: {source}", path.display())]
    Write {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn data(context: impl Into<String>, message: impl std::fmt::Display) -> Self {
        Self::Data {
            context: context.into(),
            message: message.to_string(),
        }
    }

    /// Wraps a library error; too little history counts as bad input, not a
    /// numerical failure.
    pub fn compute(context: impl Into<String>, source: hfts_core::Error) -> Self {
        match source {
            hfts_core::Error::SampleTooSmall { .. }
            | hfts_core::Error::MissingData(_)
            | hfts_core::Error::Misaligned(_)
            | hfts_core::Error::InvalidHierarchy(_) => Self::data(context, source),
            source => Self::Compute {
                context: context.into(),
                source,
            },
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) => 1,
            Self::Data { .. } | Self::Read { .. } => 2,
            Self::Compute { .. } | Self::Write { .. } => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
