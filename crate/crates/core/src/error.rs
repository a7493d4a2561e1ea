use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),
    #[error("index {index} needs {needed} partial quotients but only {available} are available")]
    InsufficientQuotients {
        index: usize,
        needed: usize,
        available: usize,
    },
    #[error("alpha_{0} vanishes: the rational is exhausted at this index")]
    Exhausted(usize),
    #[error("point is an endpoint of its depth-{0} cell")]
    CellEndpoint(usize),
    #[error("tail target not reached within the iteration cap of {cap} terms (tail bound {tail})")]
    IterationCap { cap: usize, tail: String },
    #[error("tolerance not reached (achieved width {achieved}, visit cap {cap} cells)")]
    VisitCap { cap: usize, achieved: String },
    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T> = std::result::Result<T, Error>;
