use thiserror::Error;

/// Errors raised by the simulation pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("quadrature failed to converge: {0}")]
    Quadrature(String),

    #[error("grid error: {0}")]
    Grid(String),

    #[error("length mismatch: {0}")]
    Length(String),
}

impl Error {
    /// True for errors caused by invalid user input rather than numerical failure.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Grid(_) | Error::Length(_))
    }

    /// Same error with `label: ` prepended to its message.
    pub fn context(self, label: &str) -> Self {
        match self {
            Error::Config(m) => Error::Config(format!("{label}: {m}")),
            Error::Quadrature(m) => Error::Quadrature(format!("{label}: {m}")),
            Error::Grid(m) => Error::Grid(format!("{label}: {m}")),
            Error::Length(m) => Error::Length(format!("{label}: {m}")),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
