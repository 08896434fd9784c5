use thiserror::Error;
use zetatherm_symbolic::SymbolicError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error("transfer matrix is reducible")]
    Reducible,
    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("potential must be nonnegative and not identically zero (min {min}, max {max})")]
    NotNonnegative { min: f64, max: f64 },
    #[error("series ratio e^(P(csf)-P(cf)) = e^{log_rho} is not below 1")]
    RatioNotBelowOne { log_rho: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("word {0} is not admissible")]
    Inadmissible(String),
    #[error("no periodic orbit returns to cylinder {0}")]
    NoReturningCycle(String),
}

impl CoreError {
    /// Whether the failure is numerical rather than caused by bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            CoreError::NonConvergence { .. } | CoreError::RatioNotBelowOne { .. } | CoreError::Reducible
        )
    }
}

pub type Result<T> = std::result::Result<T, CoreError>;
