use std::path::PathBuf;

use thiserror::Error;

use crate::params::Violation;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {}", join_violations(.0))]
    InvalidParams(Vec<Violation>),

    #[error("parameters outside the covered regimes: {0}")]
    OutsideTheorems(String),

    #[error("blow-up certificate requires alpha < 0 and beta <= 0 (got alpha = {alpha}, beta = {beta})")]
    NotBlowupRegime { alpha: f64, beta: f64 },

    #[error("operation needs soliton parameters (m = (n-2)/(n+2) with rho given): {0}")]
    NotSoliton(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("radius {r} outside profile range [0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },

    #[error("profile has {got} grid points, need at least {need}")]
    TooFewPoints { got: usize, need: usize },

    #[error("solver failed at r = {r}: {reason}")]
    Solver { r: f64, reason: String },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
