use std::path::PathBuf;

use thiserror::Error;

use crate::grid::Violation;

#[derive(Debug, Error)]
pub enum GridError {
    #[error("missing dataset file {0}")]
    MissingFile(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{file}{}: {message}", line.map(|l| format!(" line {l}")).unwrap_or_default())]
    Csv { file: PathBuf, line: Option<u64>, message: String },
    #[error("{file}: {message}")]
    Json { file: PathBuf, message: String },
    #[error("{} violation(s):{}", .0.len(), .0.iter().map(|v| format!("\n  - {v}")).collect::<String>())]
    Invalid(Vec<Violation>),
}

impl GridError {
    pub fn violations(&self) -> &[Violation] {
        match self {
            GridError::Invalid(v) => v,
            _ => &[],
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        GridError::Io { path: path.into(), source }
    }
}
