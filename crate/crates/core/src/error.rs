use thiserror::Error;

/// Errors raised by the library.
///
/// Variants map onto the CLI exit-code classes: parameter and regime
/// problems are hypothesis violations, iteration failures are solver
/// non-convergence.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {point:?} is outside the domain (depth {depth:.3e})")]
    OutsideDomain { point: Vec<f64>, depth: f64 },

    #[error("invalid parameter: {0}")]
    Parameter(String),

    /// A structural hypothesis of the problem class does not hold.
    #[error("hypothesis violated: {0}")]
    Regime(String),

    #[error("degenerate local frame: {0}")]
    DegenerateFrame(String),

    #[error("point outside the barrier's region of definition: {0}")]
    BarrierDomain(String),

    #[error("discretization failed: {0}")]
    Discretization(String),

    #[error("iteration limit reached after {iterations} iterations (last residual {residual:.3e})")]
    IterationLimit {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("damped fixed-point iteration oscillates (damping fell to {damping:.2e})")]
    Oscillation { damping: f64, history: Vec<f64> },

    #[error("ODE integration failed: {0}")]
    Integration(String),

    #[error("shooting bracket not found on [{lo:.3e}, {hi:.3e}]")]
    Bracket { lo: f64, hi: f64 },

    #[error("fit window error: {0}")]
    Window(String),

    #[error("barrier is not certified: {0}")]
    Uncertified(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub fn regime(msg: impl Into<String>) -> Self {
        Error::Regime(msg.into())
    }

    /// True for errors that signal a violated hypothesis or bad parameter.
    pub fn is_hypothesis(&self) -> bool {
        matches!(
            self,
            Error::Parameter(_) | Error::Regime(_) | Error::DegenerateFrame(_)
        )
    }

    /// True for solver non-convergence.
    pub fn is_convergence(&self) -> bool {
        matches!(
            self,
            Error::IterationLimit { .. } | Error::Oscillation { .. } | Error::Bracket { .. } | Error::Integration(_)
        )
    }
}
