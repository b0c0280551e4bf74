use thiserror::Error;

/// Errors produced by the simulator, the analytic engine and the harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),

    /// `p0 * p2 == 0`: the eigen decomposition of the mean matrix is not available.
    #[error("degenerate spectrum: p0 * p2 = 0")]
    DegenerateSpectrum,

    /// Spectral radius at or above one.
    #[error("supercritical regime: rho = {0} >= 1")]
    Supercritical(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameters(msg.into())
}
