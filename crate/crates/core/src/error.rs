use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of subdivisions before meeting its tolerance.
    #[error("quadrature did not converge: estimate {estimate:e}, error bound {error_bound:e}")]
    Convergence { estimate: f64, error_bound: f64 },

    /// A simulation request would allocate beyond the configured cap.
    #[error("resource limit: {0}")]
    Resource(String),

    /// Too many Monte Carlo trials were flagged as edge-affected.
    #[error("boundary bias: {flagged} of {trials} trials had the serving BS beyond a third of the window")]
    BoundaryBias { flagged: u64, trials: u64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),

    /// Wraps a failure with the sweep point that produced it.
    #[error("at {point}: {source}")]
    AtPoint { point: String, source: Box<Error> },
}

impl Error {
    /// The underlying error, with any sweep-point context removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtPoint { source, .. } => source.root(),
            e => e,
        }
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
