use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polytope is unbounded (recession direction {direction:?})")]
    Unbounded { direction: Vec<String> },
    #[error("polytope is empty")]
    Empty,
    #[error("origin is not strictly interior to the polytope")]
    OriginNotInterior,
    #[error("facet {index} is degenerate: {reason}")]
    DegenerateFacet { index: usize, reason: String },
    #[error("points span an affine subspace of dimension {rank} < {dim}")]
    LowerDimensional { rank: usize, dim: usize },
    #[error("dimension {0} is outside the supported range 1..=4")]
    UnsupportedDimension(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("lattice enumeration would visit {requested} points (cap {cap})")]
    OverflowGuard { requested: u128, cap: u128 },

    #[error("weight function is not positive on the polytope: {0}")]
    PositivityViolated(String),
    #[error("quadrature did not converge: estimate {estimate:e} above tolerance {tolerance:e}")]
    QuadratureNotConverged { estimate: f64, tolerance: f64 },

    #[error("newton iteration hit the limit of {iterations} steps (last residual {residual:e})")]
    MaxIterations { iterations: usize, residual: f64 },
    #[error("moment matrix is singular")]
    SingularMomentMatrix,

    #[error("direction vector is zero")]
    ZeroVector,
    #[error("optimization did not converge: best value {best} at {direction:?}")]
    NonConvergence { best: f64, direction: Vec<f64> },

    #[error("newton iteration diverged (damping history {damping:?})")]
    NewtonDiverged { damping: Vec<f64> },
    #[error("window too small: boundary slope misses the polytope endpoint by {gap:e}")]
    WindowTooSmall { gap: f64 },
    #[error("potential is not convex or its slopes leave the polytope: {0}")]
    NonConvexInput(String),
    #[error("numerical underflow: {0}")]
    NumericalUnderflow(String),

    #[error("invalid input at {pointer}: {message}")]
    Schema { pointer: String, message: String },
}

impl Error {
    /// Variant name, used as a stable machine-readable tag.
    pub fn tag(&self) -> &'static str {
        match self {
            Error::Unbounded { .. } => "Unbounded",
            Error::Empty => "Empty",
            Error::OriginNotInterior => "OriginNotInterior",
            Error::DegenerateFacet { .. } => "DegenerateFacet",
            Error::LowerDimensional { .. } => "LowerDimensional",
            Error::UnsupportedDimension(_) => "UnsupportedDimension",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::OverflowGuard { .. } => "OverflowGuard",
            Error::PositivityViolated(_) => "PositivityViolated",
            Error::QuadratureNotConverged { .. } => "QuadratureNotConverged",
            Error::MaxIterations { .. } => "MaxIterations",
            Error::SingularMomentMatrix => "SingularMomentMatrix",
            Error::ZeroVector => "ZeroVector",
            Error::NonConvergence { .. } => "NonConvergence",
            Error::NewtonDiverged { .. } => "NewtonDiverged",
            Error::WindowTooSmall { .. } => "WindowTooSmall",
            Error::NonConvexInput(_) => "NonConvexInput",
            Error::NumericalUnderflow(_) => "NumericalUnderflow",
            Error::Schema { .. } => "Schema",
        }
    }

    /// True for failures of a numerical method on valid input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::QuadratureNotConverged { .. }
                | Error::MaxIterations { .. }
                | Error::SingularMomentMatrix
                | Error::NonConvergence { .. }
                | Error::NewtonDiverged { .. }
                | Error::WindowTooSmall { .. }
                | Error::NumericalUnderflow(_)
        )
    }

    pub fn schema(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            pointer: pointer.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
