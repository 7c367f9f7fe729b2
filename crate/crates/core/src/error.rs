use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max deviation {0:.3e})")]
    NotHermitian(f64),

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("fixed-point iteration did not converge after {iterations} iterations (last change {last_change:.3e})")]
    FixedPointStalled { iterations: usize, last_change: f64 },

    #[error("function value outside its domain: {0}")]
    DomainError(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid rank {rank} for total dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("alpha = {alpha} outside the allowed range {range}")]
    AlphaOutOfRange { alpha: f64, range: &'static str },

    #[error("support of the first argument is not contained in the support of the second")]
    SupportViolation,

    #[error("divergence {0} is infinite")]
    DivergenceInfinite(&'static str),

    #[error("subsystem {0:?} is not a classical register")]
    NotClassicalRegister(String),

    #[error("unknown subsystem {0:?}")]
    UnknownSubsystem(String),

    #[error("gamma = {0} outside (0, 1]")]
    GammaOutOfRange(f64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("continuity chain violated at alpha = {alpha}: {detail}")]
    ContinuityViolation { alpha: f64, detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
