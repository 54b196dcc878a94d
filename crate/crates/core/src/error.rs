use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric")]
    NotSymmetric,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("zero scalar where a nonzero value is required")]
    ZeroScalar,

    #[error("matrix is singular")]
    Singular,

    #[error("invalid rational literal `{0}`")]
    ParseRational(String),

    #[error("invalid algebra parameters: {0}")]
    InvalidAlgebra(String),

    #[error("elements belong to different algebras")]
    AlgebraMismatch,

    #[error("form is not invariant: {0}")]
    NotInvariant(String),

    #[error("form is not an admissible object: {0}")]
    NotAdmissible(String),

    #[error("endomorphism is not an automorphism (grade-1 block is singular)")]
    NotAutomorphism,

    #[error("algebra is not nilpotent")]
    NotNilpotent,

    #[error("quadratic structure failed verification: {0}")]
    NotQuadratic(String),

    #[error("expected {expected} generator images, got {got}")]
    ImageCount { expected: usize, got: usize },

    #[error("unknown {kind} `{name}`")]
    Unknown { kind: &'static str, name: String },

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
