use thiserror::Error;

/// Errors surfaced by the simulation and analysis layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The configuration is valid in isolation but has no defined model
    /// (e.g. a coherent field with a mixed atomic initial condition).
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// Two curves were compared on different time grids.
    #[error("time grid mismatch: {0}")]
    GridMismatch(String),

    /// Adaptive quadrature exhausted its subdivision budget before reaching
    /// the requested tolerance.
    #[error(
        "quadrature failed to converge: error estimate {achieved:.3e} \
         exceeds tolerance {requested:.3e}"
    )]
    Integration { achieved: f64, requested: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
