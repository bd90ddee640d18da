use thiserror::Error;

/// Errors raised by the reconstruction toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Invalid or inconsistent input parameters.
    #[error("configuration error: {0}")]
    Config(String),

    /// Parameters outside the domain where the construction makes sense.
    #[error("domain error: {0}")]
    Domain(String),

    /// A phase-space point at the origin has no direction.
    #[error("degenerate direction: the phase-space point must be nonzero")]
    DegenerateDirection,

    /// A stencil left the discretized domain.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The linear solver could not produce a solution.
    #[error("solver failure: {0}")]
    Solver(String),

    /// Requested truncation radius is not covered by the coefficient table.
    #[error(
        "coverage error: truncation K = {requested} exceeds table coverage; band ({available}, {requested}] is missing"
    )]
    Coverage { requested: f64, available: f64 },

    /// A hypothesis of a stability estimate is violated.
    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    /// A constant entering a closed form vanishes.
    #[error("degenerate constant: {0}")]
    DegenerateConstant(String),

    /// The attenuated bound was requested without attenuation.
    #[error("attenuated bound needs b > 0 (got b = {0}); evaluate the unattenuated bound instead")]
    NoAttenuation(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
