use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("amplitude vector has length {got}, register requires {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("state has zero norm")]
    ZeroNorm,
    #[error("tolerance must be finite and non-negative, got {0}")]
    InvalidTolerance(f64),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("cut {cut} is out of range for a register of {n} sites")]
    CutOutOfRange { cut: usize, n: usize },
    #[error("bond dimension mismatch at site {site}: {detail}")]
    BondMismatch { site: usize, detail: String },
    #[error("step {step}: intermediate rank {rank} exceeds ancilla dimension {ancilla_dim}")]
    RankExceedsAncilla { step: usize, rank: usize, ancilla_dim: usize },
    #[error("step {step} is not an isometry (residual {residual:e})")]
    NotIsometric { step: usize, residual: f64 },
    #[error("operator is not unitary (residual {0:e})")]
    NotUnitary(f64),
    #[error("operator is not Hermitian (residual {0:e})")]
    NotHermitian(f64),
    #[error("requested measurement outcome has zero probability")]
    ZeroProbability,
    #[error("tag qubit not reset by the standard map (weight {0:e})")]
    TagNotReset(f64),
    #[error("gate order violated: {0}")]
    GateOrder(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("state is not of the expected form: {0}")]
    UnexpectedForm(String),
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
