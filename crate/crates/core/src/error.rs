use thiserror::Error;

/// Errors raised by the hull and linear-system solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    /// The pivot coincides with the current iterate; only possible through roundoff.
    #[error("degenerate pivot: squared distance {distance_sq:e} between pivot and iterate")]
    DegeneratePivot { distance_sq: f64 },

    /// The origin lies (approximately) in the hull of the matrix columns, so the matrix is singular.
    #[error("origin lies in the convex hull of the columns; matrix is singular")]
    ZeroInColumnHull,

    /// The coefficient of `-b` fell below the configured floor.
    #[error("coefficient of -b vanished ({alpha_b:e} below floor {floor:e})")]
    AlphaBVanishes { alpha_b: f64, floor: f64 },

    #[error("no shift quadratic opens upward; coefficient of -b is zero")]
    NoPositiveQuadratic,

    #[error("iteration cap of {cap} reached")]
    CapExceeded { cap: usize },

    #[error("matrix is numerically singular (eigenvalue ratio {ratio:e})")]
    NearSingular { ratio: f64 },

    #[error("singular matrix at elimination column {column}")]
    SingularMatrix { column: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
