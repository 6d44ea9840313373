use thiserror::Error;

/// Failure modes shared by every stage of the pipeline.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid elementary position ({i}, {j}) for n = {n}")]
    InvalidPosition { n: usize, i: usize, j: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix is not invertible over the integers")]
    NotUnimodular,
    #[error("polynomial degree {0} is too small (need at least 2)")]
    DegreeTooSmall(usize),
    #[error("lattice of rank {rank} does not span dimension {dim}")]
    RankDeficient { rank: usize, dim: usize },
    #[error("not an element of SL(n, Z) with n >= 3: {0}")]
    NotSl(String),
    #[error("vector is not cyclic for the matrix")]
    NotCyclic,
    #[error("cyclic vector search exhausted radius {0}")]
    SearchBudget(u32),
    #[error("matrix is not in the Bruhat cell: {0}")]
    NotInCell(String),
    #[error("ladder parameter vanished at step {0}")]
    DegenerateLadder(usize),
    #[error("budget exceeded in {stage}: {detail}")]
    BudgetExceeded { stage: String, detail: String },
    #[error("unipotent subgroup has infinite index; missing positions {missing:?}")]
    InsufficientRank { missing: Vec<(usize, usize)> },
    #[error("matrix does not satisfy the regularity hypothesis")]
    HypothesisFailed,
    #[error("identity check failed: {0}")]
    Identity(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("finite closure exceeded cap of {0} elements")]
    CapExceeded(usize),
}

pub type Result<T> = std::result::Result<T, Error>;
