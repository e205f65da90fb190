use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("InvalidParameter: {0}")]
    InvalidParameter(String),

    #[error("DomainError: x = {x} lies outside the domain {domain}")]
    DomainError { x: f64, domain: String },

    #[error("NonFinite: one-sided limit at x = {x} diverges")]
    NonFinite { x: f64 },

    #[error("QuadratureFailure: adaptive quadrature on [{lo}, {hi}] did not reach tolerance {tol:e}")]
    QuadratureFailure { lo: f64, hi: f64, tol: f64 },

    #[error("ConvergenceFailure: Newton iteration for Gauss-Legendre node {index} of order {order} did not converge")]
    ConvergenceFailure { order: usize, index: usize },

    #[error("Unsupported: {0}")]
    Unsupported(String),

    #[error("ModelUnsupported: {0}")]
    ModelUnsupported(String),

    #[error("NotPositiveDefinite: Cholesky pivot {pivot} is {value:e}")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("NoConvergence: Jacobi iteration exceeded {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("BracketFailure: level {level}, {side} bracket not found below E_max = {e_max:e}")]
    BracketFailure {
        level: usize,
        side: BracketSide,
        e_max: f64,
    },

    #[error("FitFailure: only {points} grid points inside the fit window (need at least {required})")]
    FitFailure { points: usize, required: usize },
}

impl Error {
    /// Variant name, used by the CLI when reporting solver failures.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidParameter(_) => "InvalidParameter",
            Error::DomainError { .. } => "DomainError",
            Error::NonFinite { .. } => "NonFinite",
            Error::QuadratureFailure { .. } => "QuadratureFailure",
            Error::ConvergenceFailure { .. } => "ConvergenceFailure",
            Error::Unsupported(_) => "Unsupported",
            Error::ModelUnsupported(_) => "ModelUnsupported",
            Error::NotPositiveDefinite { .. } => "NotPositiveDefinite",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::BracketFailure { .. } => "BracketFailure",
            Error::FitFailure { .. } => "FitFailure",
        }
    }
}

/// Which end of an eigenvalue bracket could not be established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BracketSide {
    Lower,
    Upper,
}

impl std::fmt::Display for BracketSide {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BracketSide::Lower => write!(f, "lower"),
            BracketSide::Upper => write!(f, "upper"),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
