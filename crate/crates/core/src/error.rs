use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("subdivision to level {level} needs {vertices} vertices, budget is {budget}")]
    VertexBudget {
        level: u32,
        vertices: usize,
        budget: usize,
    },
    #[error("vertex {0} has zero norm and cannot be projected to the sphere")]
    ZeroNormVertex(usize),
    #[error("point is not on the unit sphere (norm {0})")]
    NotUnitVector(f64),
    #[error("no base face contains the point")]
    PointNotLocated,
    #[error("degenerate triangle (area {0:e})")]
    DegenerateTriangle(f64),
    #[error("unsupported spline degree {0}, expected 1, 2 or 3")]
    InvalidDegree(u32),
    #[error("row {row}: coordinate out of range (lat {lat}, lon {lon})")]
    CoordinateOutOfRange { row: usize, lat: f64, lon: f64 },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
    #[error("non-positive pivot {value:e} at column {index} (matrix not positive definite)")]
    NonPositivePivot { index: usize, value: f64 },
    #[error("structure matrix has more than one zero eigenvalue")]
    RankDeficient,
    #[error("non-positive generalized-inverse diagonal {value:e} at knot {index}")]
    NonPositiveVariance { index: usize, value: f64 },
    #[error("constraint kriging breakdown: a'Q^-1 a = {0:e}")]
    ConstraintBreakdown(f64),
    #[error("iteration {iteration}: constraint residual {residual:e} exceeds tolerance")]
    ConstraintViolation { iteration: usize, residual: f64 },
    #[error("iteration {iteration}: non-finite draw of {parameter}")]
    NonFiniteDraw {
        iteration: usize,
        parameter: &'static str,
    },
    #[error("non-finite value at position {0}")]
    NonFinite(usize),
    #[error("metadata mismatch: {field} is {found} in the samples, {expected} requested")]
    MetadataMismatch {
        field: &'static str,
        expected: f64,
        found: f64,
    },
}
