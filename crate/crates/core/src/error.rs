use thiserror::Error;

/// Errors raised while constructing or querying graphs and paths.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("duplicate id `{0}`")]
    DuplicateId(String),
    #[error("edges `{0}` and `{1}` are not composable")]
    NotComposable(String, String),
    #[error("segment indices ({0}, {1}) out of range for a path of length {2}")]
    SegmentOutOfRange(usize, usize, String),
    #[error("path is not valid in this graph: {0}")]
    InvalidPath(String),
    #[error("unknown anchor `{0}`")]
    UnknownAnchor(String),
    #[error("stage budget {0} exhausted")]
    BudgetExhausted(usize),
    #[error("invalid document: {0}")]
    InvalidDocument(String),
}

/// Errors raised by k-graph construction and morphism arithmetic.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum KGraphError {
    #[error("invalid k-graph: {0}")]
    Invalid(String),
    #[error("morphisms are not composable: source {0} != range {1}")]
    NotComposable(String, String),
    #[error("degree {0:?} out of range for morphism of degree {1:?}")]
    DegreeOutOfRange(Vec<u32>, Vec<u32>),
    #[error("missing factorization square for `{0}`·`{1}`")]
    MissingSquare(String, String),
    #[error("budget exhausted while {0}")]
    BudgetExhausted(String),
    #[error("no boundary representative found for vertex `{0}` within budget")]
    NoBoundaryRepresentative(String),
    #[error("matrix dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("path is not a verified boundary path: {0}")]
    NotBoundary(String),
}
