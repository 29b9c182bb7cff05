use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("insufficient window: need radius {needed:.3}, have {available:.3}")]
    InsufficientWindow { needed: f64, available: f64 },
    #[error("empty input")]
    EmptyInput,
    #[error("degenerate lattice basis")]
    DegenerateBasis,
    #[error("invalid patch: {0}")]
    InvalidPatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("search budget exhausted without a certificate")]
    BudgetExhausted,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
