use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {reason}")]
    MalformedRow { line: u64, reason: String },

    #[error("line {line}: economy `{code}` is mapped more than once")]
    DuplicateCode { line: u64, code: String },

    #[error("no usable trade records")]
    EmptyInput,

    #[error("unknown economy `{0}`")]
    UnknownNode(String),

    #[error("no trade relationship `{0}` -> `{1}`")]
    UnknownEdge(String, String),

    #[error("baseline efficiency is zero, criticality and robustness are undefined")]
    DegenerateBaseline,

    #[error("network has {found} economies, at least {required} are needed")]
    TooFewNodes { required: usize, found: usize },

    #[error("network has no trade relationships")]
    NoEdges,

    #[error("strategy `{strategy}` cannot be used for {kind} attacks")]
    IncompatibleStrategy { strategy: String, kind: String },

    #[error("invalid p-grid: {0}")]
    InvalidPGrid(String),

    #[error("sample budget must be at least 1")]
    ZeroBudget,

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("series lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),

    #[error("need at least 3 observations, got {0}")]
    TooFewObservations(usize),

    #[error("invalid network: {0}")]
    InvalidNetwork(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
