use thiserror::Error;

/// Errors shared across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// Input outside the mathematical domain of an operation (pole hit,
    /// point on the unit circle, |z| >= 1 where the disk is required, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Invalid configuration: unknown preset, out-of-range parameter,
    /// non-discrete generator configuration.
    #[error("configuration error: {0}")]
    Config(String),

    /// A hard cap (element count, atom count) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// A documented precondition was violated (e.g. non-probability measure
    /// where a probability measure is required).
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Requested accuracy is not reachable with the given parameters
    /// (ill-conditioned coefficient extraction).
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// A function produced a non-finite sample during evaluation.
    #[error("evaluation error: {0}")]
    Evaluation(String),

    /// A contour or grid collides with a pole or the unit circle.
    #[error("geometry error: {0}")]
    Geometry(String),

    /// The operation is not available for this representation.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
