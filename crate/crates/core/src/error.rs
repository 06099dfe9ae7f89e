use thiserror::Error;

/// Errors raised by the library. Configuration problems live in
/// [`crate::config::ConfigError`] so the CLI can map them to their own exit code.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Domain(&'static str),

    #[error("matrix determinant {0} is not close to 1")]
    Determinant(f64),

    #[error("degenerate quadrilateral: 1 + d1*d2 = {0} is not positive")]
    DegenerateQuadrilateral(f64),

    #[error("geodesic endpoints coincide")]
    DegenerateGeodesic,

    #[error("no transversal intersection: target endpoint equals the shared endpoint")]
    NoTransversal,

    #[error("element is not hyperbolic (|trace| = {0})")]
    NotHyperbolic(f64),

    #[error("group relation residual {0} exceeds 1e-9")]
    Relation(f64),

    #[error("domain reduction did not terminate after {0} steps")]
    ReductionStuck(usize),

    #[error("rejection sampler efficiency {0} is below 1e-3")]
    SamplerEfficiency(f64),

    #[error("tail tolerance {tol} needs truncation time {needed} > max {max}")]
    Tolerance { tol: f64, needed: f64, max: f64 },

    #[error("step size underflow while integrating the time change")]
    Stiff,

    #[error("derivative order above two is not supported")]
    UnsupportedDerivative,

    #[error("path segment does not match the previous endpoint (gap {0})")]
    PathGap(f64),

    #[error("segment kind {0} is not tangent to the frame")]
    UnsupportedPath(&'static str),

    #[error("tiling failed: {0}")]
    Tiling(&'static str),
}

pub type Result<T> = std::result::Result<T, Error>;
