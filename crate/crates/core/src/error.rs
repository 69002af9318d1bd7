use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("staircase parameter s must be at least 2, got {0}")]
    InvalidGenus(i64),
    #[error("direction ({p}, {q}) is not primitive")]
    NotCoprime { p: i64, q: i64 },
    #[error("direction ({p}, {q}) is not in canonical form (q > 0, or (1, 0))")]
    NonCanonical { p: i64, q: i64 },
    #[error("slopes must be distinct, both are {0}")]
    EqualSlopes(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown curve {0}")]
    UnknownCurve(String),
    #[error("trace is not closed: {0}")]
    OpenTrace(String),
    #[error("crossing family {family} does not apply to direction {direction}")]
    FamilyMismatch { family: String, direction: String },
    #[error("point ({x}, {y}) is not in the upper half-plane")]
    NotInUpperHalfPlane { x: f64, y: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("the three geodesics do not bound a triangle")]
    NoTriangle,
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("candidate search unstable: {0}")]
    Unstable(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;
