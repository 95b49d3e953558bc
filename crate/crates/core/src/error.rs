use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("kernel mass {mass} differs from 1 by more than {tol}")]
    KernelNotNormalized { mass: f64, tol: f64 },

    #[error("kernel is not nonincreasing in the radius; support bound is unavailable")]
    KernelNotMonotone,

    #[error("kernel support radius {radius} exceeds domain length {length}")]
    KernelWiderThanDomain { radius: f64, length: f64 },

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("domain too narrow: {0}")]
    DomainTooNarrow(String),

    #[error("zero-mass datum")]
    ZeroMass,

    #[error("CFL violation: dt = {dt} exceeds stability limit {limit}")]
    Cfl { dt: f64, limit: f64 },

    #[error("instability at t = {t}: sup u = {sup} exceeds bound {bound}")]
    Instability { t: f64, sup: f64, bound: f64 },

    #[error("no convergence after {iterations} iterations (last residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("trajectory needs at least two snapshots")]
    TooFewSnapshots,

    #[error("unknown preset `{0}`")]
    UnknownPreset(String),

    #[error("config: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Errors raised by the numerics rather than by malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Instability { .. } | Error::NoConvergence { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
