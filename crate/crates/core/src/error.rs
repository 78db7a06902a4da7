use thiserror::Error;

/// Every failure the library can report.
///
/// Variants are grouped by what went wrong rather than where: the CLI maps
/// them onto exit codes with [`Error::is_invariant_violation`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimensionMismatch: {0}")]
    DimensionMismatch(String),

    #[error("NonFinite: matrix entry ({row}, {col}) is not finite")]
    NonFinite { row: usize, col: usize },

    #[error("NotHermitian: ||M - M^dagger||_F = {residual:e} exceeds tolerance {tol:e}")]
    NotHermitian { residual: f64, tol: f64 },

    #[error("NotPSD: minimum eigenvalue {min_eigenvalue:e} is below -{tol:e}")]
    NotPsd { min_eigenvalue: f64, tol: f64 },

    #[error("TraceNotOne: trace = {trace} (|trace - 1| = {residual:e} exceeds {tol:e})")]
    TraceNotOne { trace: f64, residual: f64, tol: f64 },

    #[error("NotNormalized: norm = {norm} differs from 1 by more than {tol:e}")]
    NotNormalized { norm: f64, tol: f64 },

    #[error("NoConvergence: Jacobi iteration did not converge within {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("ZeroProbabilityCondition: conditioning outcome has probability {probability:e}")]
    ZeroProbabilityCondition { probability: f64 },

    #[error("InvalidMarginals: {0}")]
    InvalidMarginals(String),

    #[error("InvalidDistribution: {0}")]
    InvalidDistribution(String),

    #[error("OutOfRange: parameter `{name}` = {value} must lie in {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
}

impl Error {
    /// Short name of the violated contract, as printed first in the message.
    pub fn name(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::NotPsd { .. } => "NotPSD",
            Error::TraceNotOne { .. } => "TraceNotOne",
            Error::NotNormalized { .. } => "NotNormalized",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::ZeroProbabilityCondition { .. } => "ZeroProbabilityCondition",
            Error::InvalidMarginals(_) => "InvalidMarginals",
            Error::InvalidDistribution(_) => "InvalidDistribution",
            Error::OutOfRange { .. } => "OutOfRange",
        }
    }

    /// True for violations of an input contract (as opposed to a numeric
    /// failure inside an otherwise valid computation).
    pub fn is_invariant_violation(&self) -> bool {
        !matches!(
            self,
            Error::NoConvergence { .. } | Error::ZeroProbabilityCondition { .. }
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
