use thiserror::Error;

/// Errors produced by the laboratory.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("graph family is undefined for n = {0} (need n >= 5)")]
    GraphTooSmall(usize),

    #[error("graph with {n} vertices exceeds the supported size of {max}")]
    GraphTooLarge { n: usize, max: usize },

    #[error("invalid edge ({0}, {1})")]
    InvalidEdge(usize, usize),

    #[error("no built-in vectors for n = {0}")]
    NoBuiltinVectors(usize),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid vector: {0}")]
    InvalidVector(String),

    #[error("measurement vectors {0} and {1} are adjacent but not orthogonal")]
    NotExclusive(usize, usize),

    #[error("transmission probability {value} outside [0, 1] at layer {layer}")]
    TransmissionOutOfRange { layer: usize, value: f64 },

    #[error("invalid beam splitter: {0}")]
    InvalidSplitter(String),

    #[error("no appendix circuit for n = {n}, vertex {vertex}")]
    UnknownFixture { n: usize, vertex: usize },

    #[error("operator precondition violated: {0}")]
    Precondition(String),

    #[error("no repeated measurement across contexts; OFNC penalty vacuous")]
    VacuousPenalty,

    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),

    #[error("curve is not monotone on the probed grid near {at}")]
    NonMonotone { at: f64 },

    #[error("no crossing of {level} found on [{lo}, {hi}]")]
    NoCrossing { level: f64, lo: f64, hi: f64 },

    #[error("no violation at zero noise (beta = {0})")]
    NoViolation(f64),

    #[error("noise parameter {0} outside [0, 1]")]
    NoiseParamOutOfRange(f64),

    #[error("qubit register needs a power-of-two dimension, got {0}")]
    NotPowerOfTwo(usize),

    #[error("invalid delay schedule: {0}")]
    InvalidSchedule(String),

    #[error("vertices {0:?} do not form a context")]
    NotAContext(Vec<usize>),

    #[error("missing circuit for vertex {0}")]
    MissingCircuit(usize),

    #[error("vertex {0} not covered by any run")]
    UncoveredVertex(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
