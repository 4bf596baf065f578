use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A disk coordinate fell outside the usable interior of the unit disk.
    #[error("domain error: |z| = {modulus} is outside the disk interior (guard band {guard:e})")]
    Domain { modulus: f64, guard: f64 },

    #[error("invalid configuration: {key}: {reason}")]
    Config { key: &'static str, reason: String },

    #[error("boundary breach: |z_{mode}| = {modulus} at t = {t}")]
    BoundaryBreach { t: f64, mode: &'static str, modulus: f64 },

    #[error("step underflow: step size {h:e} at t = {t}")]
    StepUnderflow { t: f64, h: f64 },

    #[error("truncation insufficient: neglected tail {tail:e} at N = {n}, suggested N = {suggested}")]
    TruncationInsufficient { n: usize, tail: f64, suggested: usize },

    #[error("truncation/step failure: {reason} at t = {t}")]
    EvolutionFailure { t: f64, reason: String },

    #[error("dimension cap exceeded: {dim} > {cap}")]
    DimensionCap { dim: usize, cap: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unsupported anharmonic order k = {0} (only k = 2, 3)")]
    UnsupportedOrder(usize),

    #[error("operation requires an RF drive, but the trap is a Penning trap")]
    NoRfDrive,

    #[error("expectation value has imaginary part {0:e} for a Hermitian operator")]
    NonRealExpectation(f64),
}

impl Error {
    /// Short machine-friendly name, used by the CLI when reporting failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Domain { .. } => "domain error",
            Error::Config { .. } => "invalid configuration",
            Error::BoundaryBreach { .. } => "boundary breach",
            Error::StepUnderflow { .. } => "step underflow",
            Error::TruncationInsufficient { .. } => "truncation insufficient",
            Error::EvolutionFailure { .. } => "truncation/step failure",
            Error::DimensionCap { .. } => "dimension cap exceeded",
            Error::DimensionMismatch { .. } => "dimension mismatch",
            Error::UnsupportedOrder(_) => "unsupported order",
            Error::NoRfDrive => "no rf drive",
            Error::NonRealExpectation(_) => "non-real expectation",
        }
    }
}
