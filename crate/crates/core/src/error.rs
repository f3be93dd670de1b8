use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("generator index {index} out of range 1..={n}")]
    GeneratorOutOfRange { index: usize, n: usize },
    #[error("algebra dimension {n} exceeds the supported maximum {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("zero paravector has no inverse")]
    ZeroParavector,
    #[error("kernel evaluated at its singularity x = 0")]
    Singularity,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("index {index} out of range {range}")]
    OutOfRange { index: i64, range: String },
    #[error("grid of {cells} cells exceeds the cell cap {cap}")]
    GridTooLarge { cells: u128, cap: usize },
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("evaluation failed at {at:?}: {reason}")]
    Evaluation { at: Vec<f64>, reason: String },
    #[error("point {0:?} lies outside the extension bounds")]
    OutsideBounds(Vec<f64>),
    #[error("missing jet component {0}")]
    MissingComponent(String),
    #[error("solvability condition rejected: margin {margin}")]
    GateRejected { margin: f64 },
    #[error("integrability diagnostic failed: {0}")]
    Integrability(String),
    #[error("probe not resolvable: {0}")]
    Unresolvable(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
