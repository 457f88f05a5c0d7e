use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("shape mismatch: expected {expected} values, got {actual}")]
    ShapeMismatch { expected: usize, actual: usize },

    #[error("spectral data is not conjugate-symmetric (defect {defect:.3e}); state is corrupted")]
    NotConjugateSymmetric { defect: f64 },

    #[error("velocity is not divergence-free (max |k.u| = {residual:.3e}, norm {norm:.3e})")]
    NotDivergenceFree { residual: f64, norm: f64 },

    #[error("tensor is not symmetric (max |T_ij - T_ji| = {0:.3e})")]
    AsymmetricTensor(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("blow-up or unstable dt at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("config is missing required keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
