use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid dimensions, labels, parameters or flags.
    #[error("configuration error: {0}")]
    Config(String),
    /// Two states or operators built for different grids.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// Secular function evaluated within the exclusion margin of a pole.
    #[error("secular function evaluated at a pole (alpha = {alpha:e}, pole = {pole:e})")]
    Pole { alpha: f64, pole: f64 },
    /// Bracketing, convergence or drift failure.
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::DimensionMismatch(_) => 2,
            Error::Pole { .. } | Error::Numeric(_) => 3,
            Error::Io(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
