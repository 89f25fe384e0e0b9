use thiserror::Error;

/// Errors raised by the pipeline. Every variant maps to a short, stable token
/// (see [`Error::token`]) which the command-line front-end prints on failure.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("corpus is empty after {0}")]
    EmptyCorpus(String),
    #[error("degenerate term `{0}`")]
    DegenerateTerm(String),
    #[error("query matches no model term")]
    EmptyQuery,
    #[error("invalid query: {0}")]
    InvalidQuery(String),
    #[error("unknown term `{0}`")]
    UnknownTerm(String),
    #[error("only {} reference anchors matched (need 3): [{}]", .0.len(), .0.join(", "))]
    InsufficientAnchors(Vec<String>),
    #[error("need at least 2m points: n = {n}, m = {m}")]
    SampleSize { n: usize, m: usize },
    #[error("schedule bucket {terms} terms needs {needed} tracks, only {available} available")]
    Schedule {
        terms: usize,
        needed: usize,
        available: usize,
    },
    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),
    #[error("alpha undefined: {0}")]
    UndefinedAlpha(String),
    #[error("scale `{scale}` has only {n} overlapping tracks (need 3)")]
    Coverage { scale: String, n: usize },
    #[error("every track already has a single association")]
    NothingToAblate,
    #[error("no term passes the prevalence threshold")]
    EmptyCandidate,
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("{path}:{line}: {msg}")]
    Parse { path: String, line: usize, msg: String },
    #[error("malformed document: {0}")]
    Format(String),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn token(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Parameter(_) => "parameter",
            Error::EmptyCorpus(_) => "empty-corpus",
            Error::DegenerateTerm(_) => "degenerate-term",
            Error::EmptyQuery => "empty-query",
            Error::InvalidQuery(_) => "invalid-query",
            Error::UnknownTerm(_) => "unknown-term",
            Error::InsufficientAnchors(_) => "insufficient-anchors",
            Error::SampleSize { .. } => "sample-size",
            Error::Schedule { .. } => "schedule",
            Error::UndefinedCorrelation(_) => "undefined-correlation",
            Error::UndefinedAlpha(_) => "undefined-alpha",
            Error::Coverage { .. } => "coverage",
            Error::NothingToAblate => "nothing-to-ablate",
            Error::EmptyCandidate => "empty-candidate",
            Error::Degenerate(_) => "degenerate",
            Error::Parse { .. } => "parse",
            Error::Format(_) => "format",
            Error::Io { .. } => "io",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
