//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Clone, Error)]
pub enum DickeError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    #[error("steady-state branch does not exist: {0}")]
    NonexistentBranch(String),

    #[error("no NP-SRP hopping threshold exists: cavity {cavity} is supercritical (lambda >= lambda_c); the final state is SRP&SRP for any J > 0")]
    NoHoppingThreshold { cavity: usize },

    #[error("Newton iteration did not converge within {iterations} iterations (last residual {residual:.3e})")]
    ConvergenceFailed { iterations: usize, residual: f64 },

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("spin-z elimination is near-singular: |Z_{cavity}| = {z_abs:.3e} < z_floor = {z_floor:.3e}; use the tangent-space linearization instead")]
    NearSingularElimination {
        cavity: usize,
        z_abs: f64,
        z_floor: f64,
    },

    #[error("eigenvalue solver failed on matrix {matrix}")]
    EigenSolverFailure { matrix: String },

    #[error("no stability boundary found in [{lo:.6}, {hi:.6}]")]
    NoBoundary { lo: f64, hi: f64 },

    #[error("bracket endpoints carry the same label ({label}); bisection needs a sign change")]
    BracketError { label: String },

    #[error("integrator failure at t = {t:.6}: {reason}")]
    IntegratorFailure { t: f64, reason: String },

    #[error("invalid axis specification: {0}")]
    InvalidAxis(String),
}

pub type Result<T> = std::result::Result<T, DickeError>;
