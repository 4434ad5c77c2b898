use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid symbol: {0}")]
    InvalidSymbol(String),

    #[error("threshold search failed: no M <= {limit} satisfies the high-frequency conditions")]
    ThresholdNotFound { limit: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch between operands")]
    GridMismatch,

    #[error("inadmissible parameters: requires {0}")]
    Inadmissible(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("time {t} lies outside the trajectory span [{start}, {end}]")]
    OutsideSpan { t: f64, start: f64, end: f64 },

    #[error("quadrature did not converge: refinements differ by {diff:e} (tolerance {tol:e})")]
    QuadratureNonConvergence { diff: f64, tol: f64 },

    #[error("Picard iteration did not converge in {iterations} iterations (last distance {last:e})")]
    NoConvergence { iterations: usize, last: f64 },

    #[error("horizon underflow: contraction rule gives T = {horizon:e} < 1e-6")]
    HorizonUnderflow { horizon: f64 },

    #[error("step instability at t = {t}: norm grew by factor {growth}")]
    StepInstability { t: f64, growth: f64 },

    #[error("denominator band check failed: {0}")]
    DenominatorBand(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
