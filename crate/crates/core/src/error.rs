use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Which fluid layer a depth check failed on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Layer {
    Upper,
    Lower,
}

impl std::fmt::Display for Layer {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Layer::Upper => f.write_str("upper"),
            Layer::Lower => f.write_str("lower"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid value for `{field}`: {message}")]
    Validation { field: &'static str, message: String },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("non-finite value in {what} at index {index}")]
    Corruption { what: &'static str, index: usize },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("cavitation in the {layer} layer: min depth {min_depth:e} at x = {x}")]
    Cavitation { layer: Layer, min_depth: f64, x: f64 },

    #[error("conjugate gradient did not converge in {iterations} iterations (relative residual {residual:e})")]
    Solver {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path} already holds results (pass --force to replace them)")]
    Exists { path: PathBuf },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn validation(field: &'static str, message: impl Into<String>) -> Self {
        Error::Validation {
            field,
            message: message.into(),
        }
    }

    /// True for failures that signal the solution itself has degenerated
    /// (loss of positivity, divergence) rather than a usage or I/O problem.
    pub fn is_breakdown(&self) -> bool {
        matches!(
            self,
            Error::Cavitation { .. } | Error::Solver { .. } | Error::Corruption { .. }
        )
    }
}
