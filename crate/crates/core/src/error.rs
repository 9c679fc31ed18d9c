use thiserror::Error;

/// Errors produced by the library. The CLI maps every variant to exit code 1.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("extension degree must be at least 1, got {0}")]
    BadDegree(u32),
    #[error("field size {p}^{e} exceeds the bound {bound}")]
    FieldTooLarge { p: u64, e: u32, bound: u64 },
    #[error("element index {index} out of range for a field of size {q}")]
    ElementOutOfRange { index: u64, q: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("vectors live over different fields")]
    FieldMismatch,
    #[error("enumeration of {count} vectors exceeds the bound {bound}")]
    EnumerationTooLarge { count: u128, bound: u64 },
    #[error("graph with {n} vertices exceeds the dense-matrix bound {bound}")]
    GraphTooLarge { n: u128, bound: usize },
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("vertex index {index} out of range (n = {n})")]
    VertexOutOfRange { index: usize, n: usize },
    #[error("expected a {expected} graph")]
    WrongFamily { expected: &'static str },
    #[error("pattern graph has {0} vertices; at most 8 are supported")]
    PatternTooLarge(usize),
    #[error("invalid pattern graph: {0}")]
    InvalidPattern(String),
    #[error("oracle work {work} exceeds the bound {bound}")]
    WorkBoundExceeded { work: u128, bound: u128 },
    #[error("the zero vector is not a vertex of the orthogonality graph")]
    ZeroVector,
    #[error("vector {0} is not a vertex of this graph")]
    UnknownVertex(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
