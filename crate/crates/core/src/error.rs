use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid unit system: {0}")]
    InvalidUnitSystem(String),

    #[error("unknown unit label `{0}`")]
    UnknownUnit(String),

    #[error("dimension vectors belong to different unit systems")]
    MismatchedSystems,

    #[error("quantity `{name}` has invalid range [{lo}, {hi}]; need 0 < lo < hi")]
    InvalidRange { name: String, lo: f64, hi: f64 },

    #[error("no quantities given")]
    EmptyQuantities,

    #[error("the units of `{qoi}` cannot be formed from the given quantities")]
    Inconsistent { qoi: String },

    #[error("dimension mismatch in {what}: expected {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("quantity `{name}` must be strictly positive, got {value}")]
    NonPositive { name: String, value: f64 },

    #[error("rank deficient: {0}")]
    RankDeficient(String),

    #[error("model returned non-finite value {value} at x = {point:?}")]
    NonFinite { point: Vec<f64>, value: f64 },

    #[error("matrix is not symmetric (relative asymmetry {0:e})")]
    Asymmetric(f64),

    #[error("no spectral gap at k = {k}: lambda_k = {lk:e}, lambda_k+1 = {lk1:e}")]
    NoSpectralGap { k: usize, lk: f64, lk1: f64 },

    #[error("eigenvalue {value:e} is negative beyond rounding (lambda_1 = {top:e})")]
    NegativeEigenvalue { value: f64, top: f64 },

    #[error("{0} did not converge")]
    NoConvergence(&'static str),

    #[error("columns are not orthonormal (Gram deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("turbulent velocity out of validity (log argument {0} >= 1)")]
    OutOfValidity(f64),

    #[error("model file: {0}")]
    Schema(String),

    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) => 2,
            Error::InvalidUnitSystem(_)
            | Error::UnknownUnit(_)
            | Error::MismatchedSystems
            | Error::InvalidRange { .. }
            | Error::EmptyQuantities
            | Error::Inconsistent { .. }
            | Error::Schema(_)
            | Error::Json(_)
            | Error::Csv(_)
            | Error::Io(_) => 3,
            _ => 4,
        }
    }
}
