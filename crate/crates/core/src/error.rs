use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },
    #[error("edge {edge} out of range for a graph with {count} edges")]
    EdgeOutOfRange { edge: usize, count: usize },
    #[error("color {color} out of range (graph has {count} colors)")]
    ColorOutOfRange { color: usize, count: usize },
    #[error("edge {edge} is a tadpole")]
    Tadpole { edge: usize },
    #[error("color {color} contains a directed cycle")]
    ColoredCycle { color: usize },
    #[error("too many colors: {0} (at most 7 supported)")]
    TooManyColors(usize),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("vertex {vertex} is not 1-valent (valence {valence})")]
    NotOneValent { vertex: usize, valence: usize },
    #[error("inconsistent constraints: {0}")]
    InconsistentConstraints(String),
    #[error("slice bounds exceeded: {0} (use force to override)")]
    BoundsExceeded(String),
    #[error("basis closure failure: differential term {term} not found in target slice {slice}")]
    BasisClosure { term: String, slice: String },
    #[error("graph is disconnected")]
    Disconnected,
    #[error("not a spanning tree: {0}")]
    NotSpanningTree(String),
    #[error("skeleton edge of length {0} is outside the special complex")]
    SkeletonEdgeTooLong(usize),
    #[error("graph has no skeleton vertices")]
    NoSkeletonVertex,
    #[error("invalid skeleton graph: {0}")]
    InvalidSkeleton(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
