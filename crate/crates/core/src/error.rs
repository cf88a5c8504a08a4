use thiserror::Error;

/// Errors surfaced by validating constructors and operations with
/// preconditions.  Violated internal invariants (statements that are
/// theorems about the objects, not conditions on user input) panic instead.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid permutation window: {0}")]
    BadPermutation(String),
    #[error("operands have mismatched parameters: {0}")]
    Mismatch(String),
    #[error("invalid affine permutation: {0}")]
    BadAffinePermutation(String),
    #[error("affine permutation is not bounded: {0}")]
    Unbounded(String),
    #[error("invalid cyclic rank matrix: {0}")]
    BadRankMatrix(String),
    #[error("invalid decorated permutation: {0}")]
    BadDecorated(String),
    #[error("elements do not form a matroid: {0}")]
    NotAMatroid(String),
    #[error("invalid Grassmann necklace: {0}")]
    BadNecklace(String),
    #[error("matrix is rank-deficient: {0}")]
    RankDeficient(String),
    #[error("not comparable: {0}")]
    Incomparable(String),
    #[error("not related in k-Bruhat order: {0}")]
    NotKBruhat(String),
    #[error("lift does not exist: {0}")]
    NoLift(String),
    #[error("degree mismatch: {0}")]
    DegreeMismatch(String),
    #[error("input out of supported range: {0}")]
    OutOfRange(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
