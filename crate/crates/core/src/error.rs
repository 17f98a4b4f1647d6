use thiserror::Error;

/// Errors raised by the solvers and the run driver.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("exponent alpha = {0} outside (2, 4]")]
    HypothesisRange(f64),

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("no convergence after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("point {x} outside grid [{lo}, {hi}]")]
    OutOfGrid { x: f64, lo: f64, hi: f64 },

    #[error("turning point {turning} beyond solver range {limit}; increase x_max")]
    TurningPointOutOfRange { turning: f64, limit: f64 },

    #[error("lambda = {lambda} outside the validity window of the {regime} representation")]
    Regime { lambda: f64, regime: &'static str },

    #[error("singular kernel: |W| = {0:.3e} below resonance floor")]
    SingularKernel(f64),

    #[error("oscillation within stencil at t = {0}: not a tail")]
    Oscillation(f64),

    #[error("grid of {points} points exceeds the memory budget; try dx >= {suggested_dx}")]
    Sizing { points: usize, suggested_dx: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Machine readable code recorded in run manifests.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Contract(_) => "CONTRACT",
            Error::HypothesisRange(_) => "HYPOTHESIS_RANGE",
            Error::Hypothesis(_) => "HYPOTHESIS",
            Error::NonConvergence { .. } => "NON_CONVERGENCE",
            Error::OutOfGrid { .. } => "OUT_OF_GRID",
            Error::TurningPointOutOfRange { .. } => "TURNING_POINT_RANGE",
            Error::Regime { .. } => "REGIME",
            Error::SingularKernel(_) => "SINGULAR_KERNEL",
            Error::Oscillation(_) => "OSCILLATION",
            Error::Sizing { .. } => "SIZING",
            Error::Config(_) => "CONFIG",
            Error::Io(_) => "IO",
        }
    }

    /// Process exit status for the command line driver.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Io(_) => 2,
            Error::HypothesisRange(_) | Error::Hypothesis(_) | Error::SingularKernel(_) => 3,
            _ => 4,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
