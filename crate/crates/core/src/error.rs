use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude vector has length {got}, expected 2^{n} = {expected}")]
    DimensionMismatch { n: usize, expected: usize, got: usize },

    #[error("qubit count {0} is out of range")]
    QubitCount(usize),

    #[error("amplitude vector has zero norm")]
    ZeroVector,

    #[error("coefficients are not normalized: sum of squares is {0}")]
    NotNormalized(f64),

    #[error("invalid party subset: {0}")]
    BadSubset(String),

    #[error("invalid bipartition: {0}")]
    BadBipartition(String),

    #[error("operation requires {expected} qubits, state has {got}")]
    WrongQubitCount { expected: &'static str, got: usize },

    #[error("matrix is not unitary (residual {0:e})")]
    NotUnitary(f64),

    #[error("POVM completeness violated (residual {0:e})")]
    Incomplete(f64),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("degenerate outcome probability p1 = {0:e}")]
    DegenerateProbability(f64),

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("invalid measure id `{0}`: {1}")]
    BadMeasure(String, String),

    #[error("missing context for measure `{0}`")]
    MissingContext(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("certificate rejected: claimed gap {claimed:e}, recomputed {recomputed:e}")]
    CertificateRejected { claimed: f64, recomputed: f64 },

    #[error("malformed specification: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
