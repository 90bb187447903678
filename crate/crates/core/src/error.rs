use std::path::PathBuf;

use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("density singularity at {at}: {detail}")]
    Singularity { at: f64, detail: String },

    #[error(
        "quadrature did not converge: error estimate {estimate:e} above tolerance {tolerance:e} \
         after {subdivisions} subdivisions"
    )]
    NonConvergence {
        estimate: f64,
        tolerance: f64,
        subdivisions: usize,
    },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{}: {detail}", path.display())]
    Parse { path: PathBuf, detail: String },

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Short machine-readable tag, used by the CLI error report.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "domain",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::Singularity { .. } => "singularity",
            Error::NonConvergence { .. } => "non_convergence",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::Io { .. } => "io",
            Error::Csv { .. } => "csv",
            Error::Parse { .. } => "parse",
            Error::Json(_) => "json",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
