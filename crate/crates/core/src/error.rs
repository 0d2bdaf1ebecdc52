use std::path::PathBuf;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("failed to read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature for {what} not converged: last two estimates {previous:.12e} and {last:.12e}")]
    Quadrature {
        what: String,
        previous: f64,
        last: f64,
    },

    #[error("SCF not converged after {iterations} iterations (last energies {trace:?})")]
    ScfNotConverged { iterations: usize, trace: Vec<f64> },

    #[error("eigensolver not converged: {0}")]
    Eigen(String),

    #[error("linear dependence removed every function of {0}")]
    LinearDependence(String),

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("no well: {0}")]
    NoWell(String),

    #[error("no bound level: {0}")]
    NoBoundLevel(String),
}

impl Error {
    pub fn parse(path: impl AsRef<std::path::Path>, line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            path: path.as_ref().display().to_string(),
            line,
            msg: msg.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
