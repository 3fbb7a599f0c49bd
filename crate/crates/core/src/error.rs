use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// `Z(-inf)` is zero because the model carries no mass at `x = 0`.
    #[error("degenerate model: no support point at x = 0, so Z(-inf) = 0")]
    DegenerateModel,
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("{value} lies outside the open interval ({lo}, {hi})")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("iteration limit of {0} steps reached")]
    IterationLimit(u64),
    #[error("segment {segment}: every V-term vanished; k is too small for the -inf segment")]
    AllMassLost { segment: usize },
    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),
    #[error("parameters are not anti-ferromagnetic: gamma1 * gamma2 = {0} >= 1")]
    NotAntiferro(f64),
    #[error("infeasible sample budget: k = {k:.4e} samples per segment side (override required)")]
    Infeasible { k: f64 },
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
