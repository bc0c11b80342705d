use thiserror::Error;

/// Errors raised by the sampling, linear algebra and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension must be at least 1, got {0}")]
    ZeroDimension(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("ensemble kind `{0}` cannot be sampled as a single vector")]
    NotVectorKind(&'static str),
    #[error("concatenation needs N >= 2n, got N = {rows}, n = {cols}")]
    ConcatenationTooShort { rows: usize, cols: usize },
    #[error("non-finite entry at position {0}")]
    NonFinite(usize),
    #[error("vector is not on the unit sphere (norm {0})")]
    NotUnit(f64),
    #[error("parameter `{name}` out of range: {value}")]
    InvalidParameter { name: &'static str, value: f64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("conditioning span is rank deficient (rank {rank} < {expected})")]
    RankDeficient { rank: usize, expected: usize },
    #[error("input is compressible; a spread witness needs an incompressible vector")]
    Compressible,
    #[error("spread witness has {found} indices, fewer than the required {required}")]
    WitnessTooSmall { found: usize, required: f64 },
    #[error("rounding did not meet the target after {0} attempts")]
    RoundingExhausted(u32),
    #[error("exhaustive enumeration limited to dimension {limit}, got {n}")]
    EnumerationTooLarge { n: usize, limit: usize },
    #[error("thresholds must be finite and strictly increasing")]
    UnsortedThresholds,
}

pub type Result<T> = core::result::Result<T, Error>;
