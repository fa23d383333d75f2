use thiserror::Error;

/// Errors raised by the numerical laboratory.
///
/// Variants fall into two classes: input that violates an operation's
/// precondition ([`Error::is_validation`]) and numerical failures such as
/// quadrature non-convergence or an ill-conditioned fit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid shape: {0}")]
    InvalidShape(String),

    #[error("shape spec parse error: {0}")]
    Parse(#[from] serde_json::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("quadrature did not converge: estimate {estimate:e} > tol {tol:e} after {nodes} nodes")]
    NonConvergence {
        nodes: usize,
        estimate: f64,
        tol: f64,
    },

    #[error("consistency check failed: {0}")]
    Consistency(String),

    #[error("ill-conditioned fit: residual {residual:e} exceeds {limit:e}")]
    IllConditioned { residual: f64, limit: f64 },

    #[error("collocation system is rank deficient: rank {rank} of {cols} columns")]
    RankDeficient { rank: usize, cols: usize },

    #[error("Dirichlet fit failed: boundary residual {residual:e} > 1e-6")]
    DirichletFitFailed { residual: f64 },

    #[error("degenerate stationary point at phi = {phi}: |psi''| = {curvature:e}")]
    Degenerate { phi: f64, curvature: f64 },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// `true` for precondition and input-format failures, `false` for
    /// numerical failures.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_)
                | Error::InvalidShape(_)
                | Error::Parse(_)
                | Error::Io { .. }
                | Error::Degenerate { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
