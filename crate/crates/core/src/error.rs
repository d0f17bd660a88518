use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported root system {label}{rank}")]
    UnsupportedType { label: String, rank: usize },
    #[error("not a root: {0:?}")]
    NotARoot(Vec<i64>),
    #[error("roots are linearly dependent: {0:?} and {1:?}")]
    DependentRoots(Vec<i64>, Vec<i64>),
    #[error("no matrix representation for {0}")]
    UnsupportedRep(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimMismatch(usize, usize),
    #[error("cannot complete the W span at height {0}")]
    SpanFailure(i64),
    #[error("Cartan element {0} is not diagonal")]
    NonDiagonalCartan(usize),
    #[error("no assignment for variable {0}")]
    MissingAssignment(u32),
    #[error("matrix has no closed-form inverse: {0}")]
    NotClosedFormInvertible(String),
    #[error("matrix is not in the Lie algebra: {0}")]
    NotInLieAlgebra(String),
    #[error("structure violation in {lemma}: {detail}")]
    StructureViolation { lemma: String, detail: String },
    #[error("rank failure in {lemma}: {detail}")]
    RankFailure { lemma: String, detail: String },
    #[error("no rational solution: {0}")]
    NoRationalSolution(String),
    #[error("verification failed: {0}")]
    VerificationFailure(String),
    #[error("identity fails at entry ({row},{col}): {residual}")]
    IdentityFailure {
        row: usize,
        col: usize,
        residual: String,
    },
    #[error("matrix is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("product left the open Bruhat cell (w = {0:?})")]
    CellDegeneration(Vec<usize>),
    #[error("simple-root scaling {scaling:?} needs radicals: {radical}")]
    NonUnitScaling { scaling: Vec<String>, radical: String },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("calibration: {0}")]
    Calibration(String),
}

impl Error {
    pub(crate) fn structure(lemma: &str, detail: impl Into<String>) -> Self {
        Error::StructureViolation {
            lemma: lemma.to_string(),
            detail: detail.into(),
        }
    }

    pub(crate) fn rank(lemma: &str, detail: impl Into<String>) -> Self {
        Error::RankFailure {
            lemma: lemma.to_string(),
            detail: detail.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
