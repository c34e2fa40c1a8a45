use num_bigint::BigUint;
use thiserror::Error;

use crate::pipeline::ResourceEstimate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Io,
    Numerical,
    Precondition,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid circuit configuration: {0}")]
    InvalidConfig(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },

    #[error("control and target must differ (both {0})")]
    QubitClash(usize),

    #[error("shots must be positive")]
    ZeroShots,

    #[error("lattice of {size} vectors exceeds cap {cap}")]
    CapExceeded { size: BigUint, cap: u64 },

    #[error(
        "exact surrogation infeasible: {} lattice vectors exceed cap {cap} (dense design needs {} bytes, tier {})",
        .estimate.lattice_size, .estimate.design_matrix_bytes, .estimate.feasible_on
    )]
    ExactInfeasible {
        cap: u64,
        estimate: Box<ResourceEstimate>,
    },

    #[error("requested {requested} distinct frequencies but only {available} canonical vectors exist")]
    InsufficientSpectrum { requested: usize, available: BigUint },

    #[error("frequency {0:?} is not canonical (zero or first nonzero component negative)")]
    NonCanonicalFrequency(Vec<i64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("singular value decomposition did not converge")]
    SvdFailed,

    #[error("design matrix is identically zero")]
    ZeroDesign,

    #[error("epsilon {epsilon} exceeds sigma_p * ell = {sigma_ell}")]
    DomainTooSmall { epsilon: f64, sigma_ell: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("training diverged at iteration {iteration} (loss {loss})")]
    Divergence { iteration: usize, loss: f64 },

    #[error("missing column `{0}`")]
    MissingColumn(String),

    #[error("row {row}, column {column}: cannot parse `{value}` as a number")]
    Parse {
        row: usize,
        column: String,
        value: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Io(_) | Error::Csv(_) | Error::Json(_) | Error::MissingColumn(_) | Error::Parse { .. } => {
                ErrorKind::Io
            }
            Error::CapExceeded { .. }
            | Error::ExactInfeasible { .. }
            | Error::ZeroDesign
            | Error::SvdFailed
            | Error::NonFinite(_)
            | Error::Divergence { .. } => ErrorKind::Numerical,
            _ => ErrorKind::Precondition,
        }
    }

    /// Short stable identifier, handy for machine-readable error reports.
    pub fn code(&self) -> &'static str {
        match self {
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::QubitOutOfRange { .. } => "QubitOutOfRange",
            Error::QubitClash(_) => "QubitClash",
            Error::ZeroShots => "ZeroShots",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::ExactInfeasible { .. } => "CapExceeded",
            Error::InsufficientSpectrum { .. } => "InsufficientSpectrum",
            Error::NonCanonicalFrequency(_) => "NonCanonicalFrequency",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::EmptyInput(_) => "EmptyInput",
            Error::NonFinite(_) => "NonFinite",
            Error::ZeroDesign => "ZeroDesign",
            Error::SvdFailed => "SvdFailed",
            Error::DomainTooSmall { .. } => "DomainTooSmall",
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::Divergence { .. } => "Divergence",
            Error::MissingColumn(_) => "MissingColumn",
            Error::Parse { .. } => "ParseError",
            Error::Io(_) => "Io",
            Error::Csv(_) => "Csv",
            Error::Json(_) => "Json",
        }
    }
}
