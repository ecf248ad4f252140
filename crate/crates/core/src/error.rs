use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("polygon needs at least 3 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("degenerate polygon: vertices {index} and {next} coincide")]
    DegeneratePolygon { index: usize, next: usize },
    #[error("polygon is not locally convex at vertex {index} (delta = {delta:e})")]
    NotLocallyConvex { index: usize, delta: f64 },
    #[error("turning angles sum to {turns} turns, not an integer")]
    NonIntegralWinding { turns: f64 },
    #[error("parameter vector has length {got}, polygon has {expected} vertices")]
    LengthMismatch { expected: usize, got: usize },
    #[error("special element failed validation: rank {rank}, expected {expected}")]
    ValidationFailed { rank: usize, expected: usize },
    #[error("operation requires an even period, got n = {0}")]
    OddPeriod(usize),
    #[error("operation requires n = {expected}, got n = {got}")]
    WrongPeriod { expected: usize, got: usize },
    #[error("operation requires a (6,2) polygon, got ({n},{m})")]
    WrongPeriodOrWinding { n: usize, m: i64 },
    #[error("parameter vector is not an integral element")]
    NotIntegralElement,
    #[error("integral element is not convex at index {index}")]
    NotConvexElement { index: usize },
    #[error("convex element search supports 3 <= n <= 6, got n = {0}")]
    UnsupportedPeriod(usize),
    #[error("invalid winding: need 0 < 2m < n, got ({n},{m})")]
    InvalidWinding { n: usize, m: i64 },
    #[error("sampler exhausted its attempt budget ({attempts} attempts)")]
    SamplerExhausted { attempts: usize },
    #[error("invalid curve: {0}")]
    InvalidCurve(String),
    #[error("point is not strictly outside the curve")]
    InsideCurve,
    #[error("point lies on a supporting line that meets the curve in a segment")]
    SingularLine,
    #[error("orbit hit the singular set at step {step}")]
    SingularOrbit { step: usize },
    #[error("orbit record has no detected period")]
    NotPeriodic,
    #[error("orbit midpoint {index} is off the curve by {distance:e}")]
    MidpointOffCurve { index: usize, distance: f64 },
    #[error("unknown theorem id `{0}`")]
    UnknownTheorem(String),
}
