use thiserror::Error;

/// Errors produced by the simulator, the bound checkers and the config layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{0}")]
    InvalidParameter(String),

    #[error("lambda = 8 beta^2 / b is zero; the synchronization threshold is undefined")]
    DegenerateLambda,

    #[error("p below analytic threshold: p = {p}, p* = {p_star}")]
    BelowThreshold { p: f64, p_star: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("field has {found} values but the grid has {expected} nodes")]
    GridMismatch { expected: usize, found: usize },

    #[error(
        "helmholtz solve stopped after {iterations} iterations with relative residual {residual:e}"
    )]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("non-finite state detected at step {step}; last finite time t = {last_finite_time}")]
    NonFinite { step: u64, last_finite_time: f64 },

    #[error("horizon {horizon} is shorter than the absorbing entry time T0 = {entry_time}")]
    HorizonShorterThanEntry { horizon: f64, entry_time: f64 },

    #[error("decay-rate window [{t_start}, {t_end}] holds fewer than two samples")]
    EmptyWindow { t_start: f64, t_end: f64 },

    #[error("fully synchronized before window (sync functional is zero at t = {t})")]
    FullySynchronized { t: f64 },

    #[error("criterion not bracketed: synchronizes at p_lo = {p_lo}: {lo_syncs}, at p_hi = {p_hi}: {hi_syncs}")]
    NotBracketed {
        p_lo: f64,
        p_hi: f64,
        lo_syncs: bool,
        hi_syncs: bool,
    },

    #[error("malformed bracket: need p_lo < p_hi, got [{p_lo}, {p_hi}]")]
    MalformedBracket { p_lo: f64, p_hi: f64 },

    #[error("unknown initial-condition generator '{0}'")]
    UnknownGenerator(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("cannot write an empty time series")]
    EmptySeries,

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
