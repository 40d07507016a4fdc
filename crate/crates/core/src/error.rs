use thiserror::Error;

use crate::train::TrainingTrace;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("two constraints of derivative order {order} share the point {point}")]
    DuplicatePoint { order: usize, point: f64 },

    #[error("construction denominator vanishes for the order-{order} constraint at {point}")]
    DegenerateDenominator { order: usize, point: f64 },

    #[error("expected {expected} constraints, got {got}")]
    BadConditionCount { expected: usize, got: usize },

    #[error("constraint {0}")]
    InvalidConstraint(String),

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("bad parameter: {0}")]
    BadParameter(String),

    #[error("unsupported conditions: {0}")]
    UnsupportedConditions(String),

    #[error("jet of order {got} is too short for an order-{needed} trial")]
    JetTooShort { needed: usize, got: usize },

    #[error("bad network shape: {0}")]
    BadShape(String),

    #[error("derivative order {0} exceeds the supported maximum of {max}", max = crate::MAX_ORDER)]
    OrderTooHigh(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("collocation needs at least two points on a non-degenerate interval (count {count}, domain [{lo}, {hi}])")]
    BadCount { count: usize, lo: f64, hi: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("loss became non-finite at epoch {epoch}")]
    NonFiniteLoss { epoch: usize, trace: Box<TrainingTrace> },

    #[error("empty loss trace")]
    EmptyTrace,

    #[error("bad integration step: {0}")]
    BadStep(String),
}
