use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation (wrong
    /// dimension, non-finite value, parameter out of range).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// The geodesic between two points is not unique (antipodal points).
    #[error("degenerate geodesic: {0}")]
    DegenerateGeodesic(String),

    /// The atoms of a measure do not fit in a geodesic ball on which the
    /// Fréchet mean is well defined.
    #[error("atoms do not lie in a common geodesic ball: {0}")]
    GeodesicBall(String),

    #[error("Fréchet mean did not converge after {iterations} iterations (gradient norm {grad_norm:e})")]
    NotConverged { iterations: usize, grad_norm: f64 },

    #[error("training diverged: {0}")]
    Diverged(String),

    /// The constraint set lacks an optional capability (projection,
    /// geodesic structure) that the operation needs.
    #[error("missing capability: {0}")]
    Capability(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
