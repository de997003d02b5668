use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("edge ({0}, {1}) has an endpoint outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {0} has weight 0; weights must be at least 1")]
    ZeroWeight(usize),
    #[error("weight given for vertex {0}, but the graph has {1} vertices")]
    WeightOutOfRange(usize, usize),
    #[error("vertex {0} is outside 0..{1}")]
    BadVertex(usize, usize),
    #[error("graph has {actual} vertices, above the limit of {limit} for {what}")]
    TooLarge {
        what: &'static str,
        actual: usize,
        limit: usize,
    },
    #[error("graph must be unweighted here; apply expand_weighted first")]
    Weighted,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("conditioning on an outcome with probability {0:e}")]
    ZeroProbability(f64),
    #[error("missing entry for {0}")]
    MissingEntry(String),
    #[error("SDP did not converge (status {0:?})")]
    NotConverged(crate::theta::SdpStatus),
    #[error("orthogonal representation failed verification: {0}")]
    Extraction(String),
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown catalog entry {name:?}; available: {available}")]
    UnknownCatalog { name: String, available: String },
    /// A stage failure carried over from a report.
    #[error("{0}")]
    Reported(String),
    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
