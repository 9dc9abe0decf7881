use std::path::PathBuf;

/// Errors produced anywhere in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular hydrodynamic kernel at Q = {q:e} a.u., omega = {omega:e} a.u.")]
    SingularKernel { q: f64, omega: f64 },

    #[error(
        "quadrature did not converge ({context}): estimate {estimate:e}, error bound {error:e}"
    )]
    Quadrature {
        context: String,
        estimate: f64,
        error: f64,
    },

    #[error("chemical potential not bracketed: {0}")]
    RootNotBracketed(String),

    #[error("eigen-decomposition failed: {0}")]
    Eigen(String),

    #[error("singular Dyson system at Q = {q:e} a.u., omega = {omega:e} a.u.")]
    SingularDyson { q: f64, omega: f64 },

    #[error(
        "self-consistency not reached after {iterations} iterations (last residual {residual:e})"
    )]
    NotConverged { iterations: usize, residual: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed data file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
