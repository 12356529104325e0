use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {msg}")]
    MalformedTrace { line: usize, msg: String },

    #[error("line {line}: address {addr:#x} exceeds the 48-bit virtual address space")]
    AddressRange { line: usize, addr: u64 },

    #[error("virtual address {0:#x} exceeds the 48-bit virtual address space")]
    NonCanonical(u64),

    #[error("invalid synthetic trace spec: {0}")]
    InvalidSpec(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parameter pack has no entry for {0}")]
    MissingParameter(String),

    #[error("baseline runtime is zero")]
    ZeroBaseline,

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("config {config_id}: {source}")]
    Run {
        config_id: String,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front end. Every variant is a
    /// data error (2); panics are mapped to 3 by the binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Run { source, .. } => source.exit_code(),
            Error::MalformedTrace { .. }
            | Error::AddressRange { .. }
            | Error::NonCanonical(_)
            | Error::InvalidSpec(_)
            | Error::InvalidConfig(_)
            | Error::MissingParameter(_)
            | Error::ZeroBaseline
            | Error::EmptyInput(_)
            | Error::Io { .. }
            | Error::Json(_) => 2,
        }
    }
}
