use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}:{line}: {message}")]
    Parse {
        origin: String,
        line: u64,
        message: String,
    },
    #[error("{origin}: {message}")]
    Format { origin: String, message: String },
    #[error(transparent)]
    Core(#[from] divmap_core::Error),
    #[error("{0}")]
    Usage(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(origin: &str, line: u64, message: impl ToString) -> Self {
        Error::Parse {
            origin: origin.to_string(),
            line,
            message: message.to_string(),
        }
    }

    pub(crate) fn format(origin: &str, message: impl ToString) -> Self {
        Error::Format {
            origin: origin.to_string(),
            message: message.to_string(),
        }
    }

    /// Process exit code: 2 for bad input, 3 for a broken internal invariant.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) => 3,
            _ => 2,
        }
    }
}
