use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Parameters or arguments outside the domain where the function exists.
    #[error("domain error: {0}")]
    Domain(String),

    /// The series did not meet its truncation rule within the term cap.
    #[error("series did not converge within {terms} terms (z = {z})")]
    NonConvergence { terms: usize, z: f64 },

    #[error("quadrature failed: estimated error {estimate:e} after {subdivisions} subdivisions")]
    QuadratureFailure { estimate: f64, subdivisions: usize },

    #[error("zero tables cover different windows or parameters: {0}")]
    WindowMismatch(String),

    #[error("evaluation point {z} is within {distance:e} of the pole at {pole}")]
    PoleHit { z: f64, pole: f64, distance: f64 },

    #[error("a zero table is required: {0}")]
    MissingZeroTable(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
