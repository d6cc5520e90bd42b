use thiserror::Error;

/// Errors produced by the model, solver, sweep and spectrum-analysis layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("hyperfine tensor is not symmetric (max asymmetry {asymmetry:e} MHz)")]
    AsymmetricTensor { asymmetry: f64 },

    #[error("Liouvillian has no stationary state within tolerance")]
    NoStationaryState,

    #[error("steady state is degenerate: null space has dimension {dim}")]
    DegenerateSteadyState { dim: usize },

    #[error("steady state is not a valid density matrix: {0}")]
    InvalidState(String),

    #[error("target electron polarization {target} is unreachable (attainable range {min}..={max})")]
    UnreachableTarget { target: f64, min: f64, max: f64 },

    #[error("polarization undefined: all amplitudes are zero")]
    ZeroAmplitudes,

    #[error("spectrum error: {0}")]
    Spectrum(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),
}

impl Error {
    /// Short machine-readable tag, used in sweep status columns and CLI error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "dimension_mismatch",
            Error::InvalidParameter(_) => "invalid_parameter",
            Error::AsymmetricTensor { .. } => "asymmetric_tensor",
            Error::NoStationaryState => "no_stationary_state",
            Error::DegenerateSteadyState { .. } => "degenerate_steady_state",
            Error::InvalidState(_) => "invalid_state",
            Error::UnreachableTarget { .. } => "unreachable_target",
            Error::ZeroAmplitudes => "zero_amplitudes",
            Error::Spectrum(_) => "spectrum",
            Error::Checkpoint(_) => "checkpoint",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
