use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("singular matrix: det = {det:e}")]
    SingularMatrix { det: f64 },

    #[error("quadrature did not converge on [{a}, {b}] after {intervals} subintervals")]
    NoConvergence { a: f64, b: f64, intervals: usize },

    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutOfDomain { x: f64, lo: f64, hi: f64 },

    #[error("derivative of order {requested} requested, only {available} available")]
    OrderUnavailable { requested: usize, available: usize },

    #[error("unknown seed potential `{0}`")]
    UnknownSeed(String),

    #[error("both spinor components vanish on the working interval (near x = {x})")]
    NodeOnInterval { x: f64 },

    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    #[error("transformation matrix degenerates at {nodes:?}")]
    DegenerateOnGrid { nodes: Vec<f64> },

    #[error("transformation spinors share the eigenvalue {0}")]
    EqualEigenvalues(f64),

    #[error("spinors belong to different potentials")]
    ParentMismatch,

    #[error("wrong branch: {0}")]
    WrongBranch(String),

    #[error("logarithm argument vanishes near x = {x}")]
    NodeInLog { x: f64 },

    #[error("potential is not {expected}")]
    WrongClass { expected: &'static str },

    #[error("eigenvalue {0} repeated across chain steps")]
    RepeatedEigenvalue(f64),

    #[error("chain depth {depth} exceeds the limit {max}")]
    DepthExceeded { depth: usize, max: usize },

    #[error("N_E^2 = {0} is not positive")]
    NonPositiveNormalization(f64),

    #[error("zero spinor")]
    ZeroSpinor,

    #[error("missing step data: {0}")]
    MissingStepData(String),

    #[error("unknown example `{0}`")]
    UnknownExample(String),

    #[error("parameter out of regular range: {0}")]
    ParameterOutOfRegularRange(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;
