use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degenerate field: {0}")]
    DegenerateField(&'static str),

    #[error("undefined pulse delay: probe energy is zero at z = {z} m")]
    ZeroProbeEnergy { z: f64 },

    #[error("no stored slice at z = {z} m")]
    MissingSlice { z: f64 },

    #[error("integration failure: {0}; try a finer grid (larger n_tau or n_z)")]
    Integration(String),

    #[error("numerical instability: {0}")]
    Instability(String),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("invalid scenario: {0}")]
    Validation(String),

    #[error("sweep point {index} ({axis} = {value}): {source}")]
    SweepPoint {
        index: usize,
        axis: &'static str,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for errors caused by the user's input rather than by the solver.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::InvalidParameter(_) | Error::Parse { .. } | Error::Validation(_) => true,
            Error::SweepPoint { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}

pub(crate) fn ensure_finite(value: f64, what: &'static str) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite(what))
    }
}
