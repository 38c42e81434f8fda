use thiserror::Error;

/// Errors raised across the crate. Variants map onto the failure kinds of the
/// individual components so callers (and the CLI) can report them by name.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("vocabulary error: {0}")]
    Vocabulary(String),

    #[error("incomparable models: {0}")]
    IncomparableModels(String),

    #[error("parse error at {line}:{col}: {message}")]
    Parse {
        line: usize,
        col: usize,
        message: String,
    },

    #[error("unsupported PDDL feature `{0}`")]
    UnsupportedFeature(String),

    #[error("abstract model cannot be serialized as PDDL ({unknown} unknown modes)")]
    AbstractModel { unknown: usize },

    #[error("grounding error: {0}")]
    Grounding(String),

    #[error("trace alternation error: {0}")]
    Alternation(String),

    #[error("query format error: {0}")]
    QueryFormat(String),

    #[error("inconsistent observations: no value of {0} fits every triplet")]
    InconsistentObservations(String),

    #[error("contradiction: every candidate model was eliminated ({0})")]
    Contradiction(String),

    #[error("infeasible drift: {requested} flips requested but only {available} candidate pal-tuples")]
    InfeasibleDrift { requested: usize, available: usize },

    #[error("no trace: {0}")]
    NoTrace(String),

    #[error("search exhausted after {expanded} expansions")]
    ResourceExhausted { expanded: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable short name used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Vocabulary(_) => "vocabulary",
            Error::IncomparableModels(_) => "incomparable-models",
            Error::Parse { .. } => "parse",
            Error::UnsupportedFeature(_) => "unsupported-feature",
            Error::AbstractModel { .. } => "abstract-model-not-serializable",
            Error::Grounding(_) => "grounding",
            Error::Alternation(_) => "alternation",
            Error::QueryFormat(_) => "query-format",
            Error::InconsistentObservations(_) => "inconsistent-observations",
            Error::Contradiction(_) => "contradiction",
            Error::InfeasibleDrift { .. } => "infeasible-drift",
            Error::NoTrace(_) => "no-trace",
            Error::ResourceExhausted { .. } => "resource-exhausted",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
