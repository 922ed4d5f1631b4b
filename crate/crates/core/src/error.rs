use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("spiral pitch must be positive, got a = {0}")]
    NonPositivePitch(f64),
    #[error("circulation coefficient g[{0}] must be nonzero")]
    ZeroCirculation(usize),
    #[error("branch phases must be strictly increasing in [0, 2*pi)")]
    UnsortedPhases,
    #[error("g and theta lists must have equal nonzero length")]
    LengthMismatch,
    #[error("branch index {index} out of range for {branches} branches")]
    BranchOutOfRange { index: usize, branches: usize },
    #[error("time must be positive, got t = {0}")]
    NonPositiveTime(f64),
    #[error("radius must be positive, got r = {0}")]
    NonPositiveRadius(f64),
    #[error("point lies on a sheet branch (within tolerance); use one-sided limits")]
    OnSheet,
    #[error("finite-difference stencil of width {h} crosses a sheet at distance {distance}")]
    StencilCrossesSheet { h: f64, distance: f64 },
    #[error("compatibility conditions fail; the Biot-Savart integral does not converge")]
    CompatibilityViolated,
    #[error("adaptive quadrature failed to reach the requested tolerance (estimate {estimate})")]
    ToleranceNotMet { estimate: f64 },
    #[error("right-hand side direction is degenerate; no unique (g, mu) pair")]
    DegenerateDirection,
    #[error("solver did not converge within {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("least-squares step is rank deficient")]
    SingularJacobian,
    #[error("theta[0] fixes the rotation gauge and cannot be freed")]
    InvalidGauge,
    #[error("quadrature cell budget of {0} exceeded")]
    QuadratureBudgetExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
