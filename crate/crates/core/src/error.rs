use thiserror::Error;

/// Errors produced by model evaluation, condition checks, oracles and the CLI.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The expected marginal utility has no sign change on the action domain.
    #[error("no interior best response on [{lo}, {hi}]: expected marginal utility is {g_lo:e} at the lower end and {g_hi:e} at the upper end")]
    NoInteriorRoot { lo: f64, hi: f64, g_lo: f64, g_hi: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("receiver utility is not strictly concave at (state {state}, action {action}): U_aa = {uaa:e}")]
    ConcavityViolation { state: f64, action: f64, uaa: f64 },

    #[error("higher partial derivatives unavailable at (state {state}, action {action}): {reason}")]
    MissingDerivatives { state: f64, action: f64, reason: String },

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("invalid posterior: {0}")]
    InvalidPosterior(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("receiver marginal utility is not of the form c*(state - action): {0}")]
    NotLinearReceiver(String),

    #[error("change of variables is not monotone: {0}")]
    MonotonicityViolation(String),

    #[error("no opposing states: {0}")]
    NoOpposingStates(String),

    #[error("infeasible decomposition weights: {0}")]
    InfeasibleWeights(String),

    #[error("degenerate simplex: {0}")]
    DegenerateSimplex(String),

    #[error("unsupported support size {0}; the oracle handles 2 or 3 states")]
    UnsupportedSupportSize(usize),

    #[error("linear program failed: {0}")]
    Solver(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}
