use thiserror::Error;

/// Errors raised anywhere in the bound computations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite potential value at r = {r}")]
    Evaluation { r: f64 },

    #[error("unknown potential family `{0}`")]
    UnknownShape(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid tabulated shape: {0}")]
    InvalidTable(String),

    #[error("syntax error at offset {offset}: expected {expected}")]
    Syntax { offset: usize, expected: String },

    #[error("unknown function `{name}` at offset {offset}")]
    UnknownFunction { name: String, offset: usize },

    #[error("unbound parameter `{0}`")]
    UnboundParameter(String),

    #[error("domain error in {func} at r = {r}")]
    Domain { func: &'static str, r: f64 },

    #[error("divergent integral: {0}")]
    Divergent(String),

    #[error("tail of the shape decays too slowly: {0}")]
    SlowDecay(String),

    #[error("invalid quadrature grid: {0}")]
    InvalidGrid(String),

    #[error("non-finite integrand at node r = {r}")]
    NonFiniteIntegrand { r: f64 },

    #[error("nonpositive radius {0}")]
    NonPositiveRadius(f64),

    #[error("trace power n = {0} outside 1..=64")]
    TraceOrder(usize),

    #[error("kernel matrix is zero")]
    ZeroKernel,

    #[error("eigenvalue iteration did not converge after {iterations} steps (last relative change {delta:e})")]
    NoConvergence { iterations: usize, delta: f64 },

    #[error("shape is empty (zero trace or zero moment)")]
    EmptyShape,

    #[error("shape is not monotone nonincreasing")]
    NotMonotone,

    #[error("unsupported angular momentum {0}")]
    UnsupportedChannel(u32),

    #[error("unsupported trace order {0} for closed forms")]
    UnsupportedOrder(usize),

    #[error("no critical coupling found below g = {0:e}")]
    NoBracket(f64),

    #[error("ODE step size underflow at r = {r}")]
    StepFailure { r: f64 },

    #[error("objective is not finite anywhere on the bracket")]
    NoFiniteObjective,

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
