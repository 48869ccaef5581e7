use std::path::PathBuf;

use thiserror::Error;

/// Band edge that a metric search ran into.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandEdge {
    Lower,
    Upper,
}

impl std::fmt::Display for BandEdge {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BandEdge::Lower => f.write_str("lower"),
            BandEdge::Upper => f.write_str("upper"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("frequency {f_hz:.6e} Hz is at or below the cutoff {f_c_hz:.6e} Hz")]
    BelowCutoff { f_hz: f64, f_c_hz: f64 },

    #[error("frequency {f_hz:.6e} Hz is at or above the cutoff {f_c_hz:.6e} Hz")]
    AboveCutoff { f_hz: f64, f_c_hz: f64 },

    #[error("root solver failed: {0}")]
    SolverFailure(String),

    #[error("design infeasible: {0}")]
    DesignInfeasible(String),

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("3-dB band runs off the {0} edge of the frequency grid")]
    BandTruncated(BandEdge),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
