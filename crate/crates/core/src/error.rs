use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid Young diagram: {0}")]
    InvalidDiagram(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("step size underflow at t = {t} (last valid time)")]
    StepUnderflow { t: f64 },

    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },

    #[error("maximum number of steps exceeded at t = {t}")]
    TooManySteps { t: f64 },

    #[error("ambiguous singular-value dip near t = {t} (sigma = {sigma:e}); tighten the integration tolerances")]
    AmbiguousDip { t: f64, sigma: f64 },

    #[error("Riccati W-phase never reached the switch threshold before t = {t}")]
    SwitchNotReached { t: f64 },

    #[error("conservation drift {drift:e} exceeded limit at t = {t}")]
    ConservationDrift { t: f64, drift: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("eigensolver failure: {0}")]
    Eigen(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::NonFinite { .. }
                | Error::TooManySteps { .. }
                | Error::AmbiguousDip { .. }
                | Error::SwitchNotReached { .. }
                | Error::ConservationDrift { .. }
                | Error::Eigen(_)
        )
    }
}
