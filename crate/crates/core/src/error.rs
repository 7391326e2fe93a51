use thiserror::Error;

use crate::tempo::Trajectory;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain where a formula is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    /// Quadrature or linear algebra failed to reach the requested accuracy.
    #[error("numerical error: {message} (achieved error {achieved_error:e})")]
    Numerical {
        message: String,
        achieved_error: f64,
    },

    /// The bond-dimension cap was hit before the singular-value cutoff could be met.
    /// During propagation it carries everything computed up to the failing step.
    #[error("resource limit: {message}")]
    Resource {
        message: String,
        partial: Option<Box<Trajectory>>,
    },

    #[error("fit failed: {0}")]
    Fit(String),

    #[error("scan failed: {0}")]
    Scan(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn numerical(message: impl Into<String>, achieved_error: f64) -> Self {
        Error::Numerical {
            message: message.into(),
            achieved_error,
        }
    }

    /// Short machine-readable tag used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::Config(_) => "config",
            Error::Numerical { .. } => "numerical",
            Error::Resource { .. } => "resource",
            Error::Fit(_) => "fit",
            Error::Scan(_) => "scan",
            Error::Io(_) => "io",
        }
    }
}
