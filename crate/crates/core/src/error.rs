use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix dimensions must be at least 1x1")]
    EmptyDimension,
    #[error("expected {expected} entries, found {found}")]
    EntryCount { expected: usize, found: usize },
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("state vector contains a non-finite amplitude")]
    NonFiniteVector,
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("state vector is not normalized (squared norm {norm_sqr})")]
    NotNormalized { norm_sqr: f64 },
    #[error("dimension mismatch: expected {expected}, found {found}")]
    ShapeMismatch { expected: usize, found: usize },
    #[error("Hermitian eigensolver did not converge")]
    EigenSolver,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuditError {
    #[error("qudit dimension must be at least 2, got {0}")]
    DimensionTooSmall(usize),
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
    #[error("substeps must be at least 1")]
    ZeroSubsteps,
    #[error("p = 0 with {0} substeps has no well-defined per-step root")]
    ZeroProbabilitySubsteps(usize),
    #[error("density matrix has dimension {found}, expected {expected} for d = {d}")]
    DensityShape {
        d: usize,
        expected: usize,
        found: usize,
    },
    #[error("probability tables disagree on dimension ({0} vs {1})")]
    TableDimensionMismatch(usize, usize),
    #[error("invalid probability table: {0}")]
    InvalidTable(String),
    #[error("setting pair {0} appears more than once")]
    DuplicateSetting(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CircuitError {
    #[error("qubit count {0} outside supported range 1..=5")]
    QubitCount(usize),
    #[error("resonator dimension {0} is not a power of two in 2..=32")]
    ResonatorDimension(usize),
    #[error("gate target {target} invalid for {n} qubits")]
    Target { target: usize, n: usize },
    #[error("gate {0} has the wrong number of targets")]
    Arity(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("noiseless value {value} does not violate the inequality; no threshold exists")]
    NoViolation { value: f64 },
    #[error("inequality is violated at every sampled p; no crossing to bracket")]
    NoCrossing,
    #[error(
        "value is not monotone in p on the violating segment (near p = {p}); inspect manually"
    )]
    NonMonotone { p: f64 },
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error(transparent)]
    Qudit(#[from] QuditError),
}
