use thiserror::Error;

/// Errors raised by the geometry and verification routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("parameter point {point:?} is outside the admissible domain of {surface}")]
    OutOfDomain { surface: String, point: Vec<f64> },

    #[error("degenerate jet: normalized Gram determinant {normalized_det:e} <= {tol:e}")]
    DegenerateJet { normalized_det: f64, tol: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("empty sample set")]
    EmptySample,

    #[error("profile conditions violated on the grid: {0}")]
    ConditionsViolated(String),

    #[error("unsupported dimension: {0}")]
    BadDimension(String),

    #[error("orientation {0} requested but the jet carries no inward reference")]
    OrientationUnknown(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, GeomError>;
