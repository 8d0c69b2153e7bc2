use std::path::PathBuf;

use thiserror::Error;

use crate::algebra::Word;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("truncation mismatch: expected {expected}, found {found}")]
    TruncationMismatch { expected: usize, found: usize },

    #[error("letter {letter} outside alphabet {{0,...,{dim}}}")]
    InvalidLetter { letter: u8, dim: usize },

    #[error("word {word} has degree {degree}, above truncation {truncation}")]
    ExceedsTruncation { word: Word, degree: usize, truncation: usize },

    #[error("tensor space ({dim}, {truncation}) would hold {words} words, above the limit {limit}")]
    SpaceTooLarge { dim: usize, truncation: usize, words: usize, limit: usize },

    #[error("series requires constant term {expected}, found {found}")]
    ConstantTerm { expected: f64, found: f64 },

    #[error("word {0} is not a Lyndon word")]
    NotLyndon(Word),

    #[error("singular linear system while solving for coordinates of content {0:?}")]
    SingularSystem(Vec<usize>),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("moment check failed: error {error:e} at degree {degree} exceeds {tol:e}")]
    MomentCheck { degree: usize, error: f64, tol: f64 },

    #[error("invalid cubature formula: {0}")]
    InvalidFormula(String),

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("derivative order {requested} exceeds available order {available}")]
    DerivativeOrder { requested: usize, available: usize },

    #[error("non-finite state encountered during {0}")]
    NonFinite(&'static str),

    #[error("leaf budget exceeded: {leaves} leaves requested, budget {budget}")]
    LeafBudget { leaves: u128, budget: u64 },

    #[error("degenerate fit: {usable} usable points, at least 3 required")]
    DegenerateFit { usable: usize },

    #[error("no reference value available: {0}")]
    MissingReference(String),

    #[error("invalid bracket expression: {0}")]
    BracketParse(String),

    #[error("payoff expression error: {0}")]
    Payoff(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
