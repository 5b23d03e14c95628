use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edges {0:?} and {1:?} are not parallel translates of equal length")]
    NonMatchingEdges((usize, usize), (usize, usize)),
    #[error("edges {0:?} and {1:?} are glued by a rotation, not a translation")]
    NonTrivialHolonomy((usize, usize), (usize, usize)),
    #[error("surface has zero or negative area")]
    ZeroArea,
    #[error("invalid surface description: {0}")]
    InvalidSpec(String),
    #[error("matrix is singular or not finite")]
    SingularMatrix,
    #[error("enumeration budget exceeded at bound {bound}: {what}")]
    BoundTooLargeForBudget { bound: f64, what: String },
    #[error("flow does not close within the trace budget of {0} crossings")]
    NonClosingFlow(usize),
    #[error("no cross curve found: {0}")]
    NoCrossCurveWithinBound(String),
    #[error("no child cylinder satisfies the selection rule")]
    NoChildFound,
    #[error("twist parameter {t} outside [{lo}, {hi}]")]
    OutOfRange { t: f64, lo: f64, hi: f64 },
    #[error("block {0} has no good protochild indices")]
    EmptyBlock(usize),
    #[error("starting surface is not thick")]
    RootNotThick,
    #[error("thin cylinder is parallel to the parent cylinder")]
    ParallelToParent,
    #[error("cylinder of length {0} is too short (need more than e)")]
    TooShort(f64),
    #[error("node {0} has no children")]
    LeafNode(usize),
    #[error("internal node {0} has no children")]
    DegenerateTree(usize),
    #[error("interval of node {0} is not nested in its parent")]
    BrokenNesting(usize),
    #[error("hypothesis 4/eps^2 < log|beta| fails ({lhs} >= {rhs})")]
    HypothesisUnmet { lhs: f64, rhs: f64 },
    #[error("no starting cylinder found: {0}")]
    NoStartFound(String),
    #[error("base coordinates exceed the available numerical precision")]
    PrecisionExhausted,
    #[error("segment does not trace as a saddle connection: {0}")]
    TraceMismatch(String),
    #[error("edge flip budget exceeded")]
    FlipBudget,
    #[error("invalid constants: {0}")]
    InvalidConstants(String),
    #[error("{0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::InvalidSpec(e.to_string())
    }
}
