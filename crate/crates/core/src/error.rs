use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: expected {expected}, got {got}")]
    RankMismatch { expected: usize, got: usize },
    #[error("alpha is not invertible over Q[d]: det = {det}")]
    NonInvertibleAlpha { det: String },
    #[error("alpha is not surjective: determinant is not a nonzero constant")]
    NonSurjectiveAlpha,
    #[error("element is not fixed by alpha")]
    NotAlphaFixed,
    #[error("triple does not satisfy the generalized derivation identity")]
    InvalidTriple,
    #[error("map pair is not a quasiderivation")]
    NotQuasiderivation,
    #[error("precondition failed: {0}")]
    Precondition(String),
}
