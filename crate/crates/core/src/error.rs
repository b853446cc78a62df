use thiserror::Error;

/// Errors produced by the analysis pipeline.
#[derive(Error, Debug)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("duplicate paper id: {0}")]
    DuplicateId(String),

    #[error("unknown weighting scheme: {0}")]
    UnknownScheme(String),

    #[error("node not in graph: {0}")]
    MissingNode(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("isolated node: {0}")]
    IsolatedNode(String),

    #[error("eigen iteration did not converge after {iterations} iterations (last estimate {last_estimate})")]
    NonConvergence {
        last_estimate: f64,
        iterations: usize,
    },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("test mode not applicable: {0}")]
    Mode(String),

    #[error("degenerate axis for KDE: {0}")]
    DegenerateAxis(String),

    #[error("productivity bucket undefined for zero publications")]
    UndefinedBucket,

    #[error("correlation undefined: {0}")]
    UndefinedCorrelation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
