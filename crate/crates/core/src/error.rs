use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("tree product of two roots that both carry the noise Xi")]
    IncompatibleNoise,
    #[error("star product needs a left factor without noise at the root, got {0}")]
    StarDomain(String),
    #[error("parse error at position {pos}: expected one of {expected:?}")]
    Parse { pos: usize, expected: Vec<String> },
    #[error("noise degree {0} is not subcritical (must exceed -2)")]
    NotSubcritical(String),
    #[error("unsupported input: {0}")]
    Unsupported(String),
    #[error("input tree is not local: {0}")]
    NotLocalInput(String),
    #[error("non-local residue survives: {0}")]
    NonlocalResidue(String),
    #[error("sector {0} is not supported (expected 2 or 4)")]
    SectorUnsupported(u32),
    #[error("quadrature did not reach tolerance {tolerance:e} (error estimate {estimate:e})")]
    QuadratureFailure { tolerance: f64, estimate: f64 },
    #[error("truncation too small: {0}")]
    TruncationTooSmall(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
