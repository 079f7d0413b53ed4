use thiserror::Error;

/// Errors raised by the bracket, coordinatization, Grassmann-Cayley and
/// membership layers.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("bracket needs at least one index")]
    EmptyBracket,
    #[error("bracket indices must be positive, got {0}")]
    NonPositiveIndex(usize),
    #[error("bracket width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),
    #[error("column label {0} is not present in the matrix")]
    MissingLabel(usize),
    #[error("matrix has {rows} rows but bracket width is {width}")]
    RowMismatch { rows: usize, width: usize },
    #[error("symbolic expansion would exceed {0} monomials")]
    ExpansionTooLarge(usize),
    #[error("index {index} out of range 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("sequence must be strictly increasing")]
    NotIncreasing,
    #[error("no van der Waerden shape fits |alpha|={alpha}, |beta|={beta}, |gamma|={gamma} at width {width}")]
    InvalidSyzygyShape { alpha: usize, beta: usize, gamma: usize, width: usize },
    #[error("lift index {0} already belongs to the index set")]
    IndexNotFresh(usize),
    #[error("ambient dimension mismatch: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("meet of steps {0} and {1} is undefined in ambient {2}")]
    StepSumTooSmall(usize, usize, usize),
    #[error("step {step} is outside [0, {ambient}]")]
    StepOutOfRange { step: usize, ambient: usize },
    #[error("expression has step {0}; expected a scalar (step 0 or top step)")]
    NotScalar(usize),
    #[error("unknown point label {0}")]
    UnknownLabel(usize),
    #[error("span of the zero extensor is undefined")]
    ZeroExtensor,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("dimension {0} is too small (need d >= {1})")]
    DimensionTooSmall(usize, usize),
    #[error("invalid partition of the complement: {0}")]
    InvalidPartition(String),
    #[error("expected {expected} points, got {got}")]
    WrongPointCount { expected: usize, got: usize },
    #[error("point {0} has the wrong number of coordinates")]
    CoordinateLength(usize),
    #[error("point {0} is the zero vector")]
    ZeroColumn(usize),
    #[error("parameter {0} is repeated")]
    RepeatedParameter(String),
    #[error("transform matrix is singular or has the wrong shape")]
    SingularTransform,
    #[error("triple {0:?} does not span a plane")]
    DegenerateTriple([usize; 3]),
    #[error("invalid subset: {0}")]
    InvalidSubset(String),
    #[error("not a Steiner triple system: {0}")]
    InvalidTripleSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
