use thiserror::Error;

/// Errors raised for invalid input. Mathematical negatives (obstructions,
/// nonexistence) are verdicts, never errors.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error{}: {msg}", line.map(|l| format!(" at line {l}")).unwrap_or_default())]
    Parse { line: Option<usize>, msg: String },
    #[error("nice condition violated: {0}")]
    NotNice(String),
    #[error("Jacobi identity fails: {0}")]
    Jacobi(String),
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("diagram axiom violated: {0}")]
    DiagramAxiom(String),
    #[error("unsupported size: {n} nodes exceeds search bound {max}")]
    UnsupportedSize { n: usize, max: usize },
    #[error("{0} is not a diagram automorphism")]
    NotAutomorphism(String),
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    pub(crate) fn parse(line: Option<usize>, msg: impl Into<String>) -> Self {
        Error::Parse { line, msg: msg.into() }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
