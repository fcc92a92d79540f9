use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: u64,
        message: String,
    },

    #[error("{0}: no valid edges")]
    EmptyInput(PathBuf),

    #[error("edge count mismatch: {left} vs {right}")]
    EdgeCountMismatch { left: usize, right: usize },

    #[error("edge {edge}: point count mismatch ({left} vs {right})")]
    PointCountMismatch {
        edge: usize,
        left: usize,
        right: usize,
    },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("CSV error on {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("image encoding error on {path}: {source}")]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        let path = path.into();
        match source.kind() {
            csv::ErrorKind::Io(_) => match source.into_kind() {
                csv::ErrorKind::Io(e) => Error::Io { path, source: e },
                _ => unreachable!(),
            },
            _ => Error::Csv { path, source },
        }
    }
}
