use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state specification: {0}")]
    InvalidSpec(String),
    #[error("series did not converge: {what} needs more than {terms} terms")]
    NonConvergentSum { what: String, terms: usize },
    #[error("quadrature failed: {0}")]
    QuadratureFailure(String),
    #[error("Gaussian moment requires Re(alpha) > 0, got {0}")]
    InvalidAlpha(f64),
    #[error("Wigner grid too coarse: norm estimate {0}")]
    GridTooCoarse(f64),
    #[error("inverse transform anchor |f(0)| = {0:e} is too small")]
    ZeroAnchor(f64),
    #[error("information matrix is singular (determinant {0:e})")]
    SingularMatrix(f64),
    #[error("no root: target {target} outside [{lo}, {hi}]")]
    NoRoot { target: f64, lo: f64, hi: f64 },
    #[error("dip profile is not monotone on the search window")]
    NonMonotoneWindow,
}

impl Error {
    /// True for errors caused by bad user input rather than numerical trouble.
    pub fn is_validation(&self) -> bool {
        matches!(self, Error::InvalidSpec(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
