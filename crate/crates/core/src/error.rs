use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("truncation orders differ ({left} vs {right})")]
    OrderMismatch { left: usize, right: usize },
    #[error("series has zero constant term")]
    SingularSeries,
    #[error("expected constant term 1, found {0}")]
    Normalization(Complex64),
    #[error("point {0} lies outside the admissible disk")]
    Domain(Complex64),
    #[error("singularity at z = {0}")]
    Singularity(Complex64),
    #[error("boundary singularity at z = {0}")]
    BoundarySingularity(Complex64),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("contour |z| = {radius} passes within {distance:e} of w = {target} (resolution {resolution:e})")]
    ContourTooClose {
        radius: f64,
        target: Complex64,
        distance: f64,
        resolution: f64,
    },
    #[error("winding integral {value} is not an integer (residual {residual:e})")]
    NonIntegerWinding { value: Complex64, residual: f64 },
    #[error("bisection bracket failure: {0}")]
    Bracket(String),
    #[error("p = -1 at z = {0}; Wirtinger derivative degenerates")]
    DegenerateDerivative(Complex64),
}

pub type Result<T> = std::result::Result<T, Error>;
