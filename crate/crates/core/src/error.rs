use thiserror::Error;

/// Errors raised by sample construction, estimation, testing and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("sample too short: {got} observations, need at least {need}")]
    TooShort { got: usize, need: usize },

    #[error("non-finite value in `{column}` at position {index}")]
    NonFinite { column: &'static str, index: usize },

    #[error("degenerate regressor: sum of squared predictor values is zero")]
    DegenerateRegressor,

    #[error("degenerate instrument: instrument moments are zero")]
    DegenerateInstrument,

    #[error("empty kernel window at r = {r} (h·T too small)")]
    EmptyWindow { r: f64 },

    #[error("estimated volatility is zero at r = {r}")]
    ZeroVolatility { r: f64 },

    #[error("degenerate volatility estimate at index {index}: {value:e} below floor {floor:e}")]
    DegenerateVolatility { index: usize, value: f64, floor: f64 },

    #[error("invalid bandwidth: {0}")]
    InvalidBandwidth(String),

    #[error("kernel {0} is not Lipschitz on the real line")]
    NonLipschitzKernel(&'static str),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("volatility process left the representable range at step {step}")]
    VolatilityUnderflow { step: usize },

    #[error("need at least {need} null statistics, got {got}")]
    InsufficientNullDraws { got: usize, need: usize },

    #[error("{failed} of {total} replications failed (limit 1%): {first}")]
    TooManyFailures {
        failed: usize,
        total: usize,
        first: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
