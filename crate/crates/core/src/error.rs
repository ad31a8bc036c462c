use thiserror::Error;

use crate::geom::Shape;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("symbol `{symbol}` is not in the alphabet")]
    SymbolOutOfAlphabet { symbol: String },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("language is empty at depth {depth}")]
    EmptyLanguage { depth: Shape },
    #[error("candidate space for shape {shape} exceeds the enumeration bound {bound}")]
    ShapeOverflow { shape: Shape, bound: u128 },
    #[error("shape {shape} is too small to shift by {by}")]
    ShapeUnderflow { shape: Shape, by: Shape },
    #[error("depth {depth} is too small; need at least {needed}")]
    DepthTooSmall { depth: Shape, needed: Shape },
    #[error("depth mismatch: {0}")]
    DepthMismatch(String),
    #[error("window cell ({0},{1}) lies outside the depth box")]
    WindowOutsideDepth(usize, usize),
    #[error("pattern is not admissible: {0}")]
    NotAdmissible(String),
    #[error("rho is not a bijection: {0}")]
    RhoNotBijective(String),
    #[error("edge endpoints do not match: {0}")]
    EndpointMismatch(String),
    #[error("vertex matrices do not commute")]
    NoncommutingVertexMatrices,
    #[error("sides are not composable: {0}")]
    IncomposableSides(String),
    #[error("grid completion conflict at square ({0},{1})")]
    CompletionConflict(usize, usize),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("unknown edge `{0}`")]
    UnknownEdge(String),
    #[error("shift is not locally injective on any scanned window; no finite frame")]
    NotLocallyInjective,
    #[error("operation not supported for this model: {0}")]
    Unsupported(String),
    #[error("pair is not a groupoid element: {0}")]
    IncompatiblePair(String),
    #[error("elements are not composable: {0}")]
    NonComposable(String),
    #[error("{n} is not below {m} componentwise")]
    NonComparable { n: Shape, m: Shape },
    #[error("kernel has support outside the relation: {0}")]
    SupportViolation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("inconsistent Bratteli diagram: {0}")]
    InconsistentDiagram(String),
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("parse error: {0}")]
    Parse(String),
}
