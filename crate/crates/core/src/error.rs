use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("series did not converge within {max_terms} terms (remainder bound {remainder:e})")]
    NonConvergent { max_terms: usize, remainder: f64 },

    #[error("argument outside the domain of validity: {0}")]
    Domain(String),

    #[error("quadrature tail bound {tail_bound:e} exceeds tolerance {tolerance:e}")]
    Quadrature { tail_bound: f64, tolerance: f64 },

    #[error("singular denominator |D| = {0:e} in the heat-integral weight")]
    SingularDenominator(f64),

    #[error("multiplier is not finite at |xi| = {0}")]
    SymbolNonFinite(f64),

    #[error("oscillatory integral not converged: cutoff doubling changed the value by {change:e} (tolerance {tolerance:e})")]
    NotConverged { change: f64, tolerance: f64 },

    #[error("Picard iteration is not contracting: distances grew for {0} consecutive iterations")]
    NotContracting(usize),

    #[error("degenerate parameters: {0}")]
    DegenerateParams(String),

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("time window too short: tail estimate {tail:e} exceeds half the tolerance {tolerance:e}")]
    WindowTooShort { tail: f64, tolerance: f64 },

    #[error("box too small: boundary mass fraction {fraction:e} after enlarging to n = {n}")]
    BoxTooSmall { fraction: f64, n: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
