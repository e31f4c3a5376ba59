use thiserror::Error;

/// Errors raised by the workbench. Numerical falsifiers (verdict disagreements,
/// broken identities) are reported through the same type so callers can map
/// them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("algebra mismatch: {0}")]
    AlgebraMismatch(String),
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("element is not self-adjoint (residual {0:e})")]
    NotSelfAdjoint(f64),
    #[error("degree overflow: product needs degree {needed} but the window stops at {max}")]
    DegreeOverflow { needed: usize, max: usize },
    #[error("expected a unique solution for {what}, found a solution space of dimension {dim}")]
    NonUnique { what: String, dim: usize },
    #[error("not positive: {0}")]
    NotPositive(String),
    #[error("span deficiency: {0}")]
    SpanDeficiency(String),
    #[error("no spectral gap: {what} (gap {gap:e})")]
    NoSpectralGap { what: String, gap: f64 },
    #[error("unsolvable system: {what} (residual {residual:e})")]
    Unsolvable { what: String, residual: f64 },
    #[error("falsified: {0}")]
    Falsified(String),
    #[error("rewriting: {0}")]
    Rewrite(String),
    #[error("unknown label: {0}")]
    UnknownLabel(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
