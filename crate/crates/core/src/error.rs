use std::fmt;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Pipeline stage used to annotate errors raised by [`crate::run_selection`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Summary,
    Hypotheses,
    Reduction,
    Statistics,
    Adjustment,
    Decision,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Stage::Summary => "summary",
            Stage::Hypotheses => "hypotheses",
            Stage::Reduction => "reduction",
            Stage::Statistics => "statistics",
            Stage::Adjustment => "adjustment",
            Stage::Decision => "decision",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("expected a {expected} graph, got a {found} graph")]
    WrongGraphKind { expected: &'static str, found: &'static str },
    #[error("graph contains a directed cycle")]
    CyclicGraph,
    #[error("vertex {vertex} out of range for a graph on {p} vertices")]
    VertexOutOfRange { vertex: usize, p: usize },
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex sets must be pairwise disjoint")]
    OverlappingSets,
    #[error("edge between {0} and {1} is present")]
    EdgePresent(usize, usize),
    #[error("no separating set for {0} and {1} within the admissible vertices")]
    NoSeparator(usize, usize),
    #[error("ordering is not a permutation of 0..{0}")]
    InvalidOrdering(usize),
    #[error("edge list line {line}: {message}")]
    EdgeListParse { line: usize, message: String },
    #[error("csv row {row}, column {column}: {message}")]
    Csv { row: usize, column: usize, message: String },
    #[error("need at least p + 1 = {needed} observations, got {n}")]
    InsufficientSamples { n: usize, needed: usize },
    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("non-finite value encountered ({0})")]
    NonFinite(String),
    #[error("correlation {0} outside (-1, 1)")]
    InvalidCorrelation(f64),
    #[error("effective sample size {n_eff} below the minimum {min}")]
    SampleSizeTooSmall { n_eff: i64, min: usize },
    #[error("p-value {value} at position {index} outside [0, 1]")]
    InvalidPValue { index: usize, value: f64 },
    #[error("need at least {min} Monte-Carlo draws, got {got}")]
    TooFewDraws { got: usize, min: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("inconsistent prior knowledge: {0}")]
    InconsistentPrior(String),
    #[error("model generation failed after {0} attempts")]
    RetryBudgetExhausted(usize),
    #[error("{stage} stage: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn at(stage: Stage) -> impl FnOnce(Error) -> Error {
        move |source| Error::Stage { stage, source: Box::new(source) }
    }

    /// Innermost error, skipping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of the numerical pipeline on otherwise valid input
    /// (singular matrices, degenerate data), as opposed to invalid input.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self.root(),
            Error::NotPositiveDefinite(_)
                | Error::NonFinite(_)
                | Error::InvalidCorrelation(_)
                | Error::RetryBudgetExhausted(_)
                | Error::NoSeparator(..)
        )
    }
}
