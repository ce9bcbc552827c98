use crate::quad::QuadError;

/// Errors raised by the numerical routines of this crate.
#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum Error {
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported dimension d = {0}")]
    UnsupportedDimension(u8),
    #[error("invalid potential: {0}")]
    InvalidPotential(String),
    #[error("solver requires V >= 0: {0}")]
    NegativePotential(String),
    #[error("eigen-solver did not converge: best estimate {best} with residual {residual:e}")]
    EigenNotConverged { best: f64, residual: f64 },
    #[error("near-degenerate ground state: relative gap {gap:e}")]
    NearDegenerate { gap: f64 },
    #[error("T_c below resolvable range: lambda * a_T = {value} at T = {t_floor:e}")]
    TcBelowRange { t_floor: f64, value: f64 },
    #[error("bracket expansion failed: lambda * a_T = {value} at T = {t_ceiling:e}")]
    BracketExpansion { t_ceiling: f64, value: f64 },
    #[error("grid refinement did not reach the requested accuracy: relative change {change:e}")]
    GridNotConverged { change: f64 },
    #[error("not enough samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
