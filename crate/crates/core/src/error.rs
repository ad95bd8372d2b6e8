use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("x = {x} lies outside the domain [{lo}, {hi}]")]
    OutsideDomain { x: f64, lo: f64, hi: f64 },

    #[error("derivative order {order} exceeds the supported maximum {max}")]
    OrderOutOfRange { order: usize, max: usize },

    #[error("delta must lie in (0, 1/2), got {0}")]
    InvalidDelta(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("operation requires a polynomial curve with exact rational coefficients")]
    NotPolynomial,

    #[error("exact counting requires a rational delta (p/q), got {0}")]
    IrrationalDelta(String),

    #[error("hypothesis certification failed: {0}")]
    Certification(String),

    #[error("slope {y} lies outside the slope interval [{lo}, {hi}]")]
    OutsideSlopeInterval { y: f64, lo: f64, hi: f64 },

    #[error("second derivative vanishes near x = {0}; derivative is not invertible there")]
    NotInvertible(f64),

    #[error("quadrature did not reach tolerance {tol:e} within {panels} panels (estimate {estimate:e})")]
    QuadratureBudget { tol: f64, panels: usize, estimate: f64 },

    #[error("phase derivative is not strictly increasing: {0}")]
    NotMonotone(String),

    #[error("stationary point {theta} lies in the cutoff transition region of [{lo}, {hi}]")]
    StationaryPointInTransition { theta: f64, lo: f64, hi: f64 },

    #[error("fit needs at least {needed} usable rows, found {found}")]
    InsufficientRows { needed: usize, found: usize },

    #[error("exact arithmetic overflow")]
    Overflow,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of a numeric procedure (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::QuadratureBudget { .. }
                | Error::OutsideSlopeInterval { .. }
                | Error::NotInvertible(_)
                | Error::Certification(_)
                | Error::NotMonotone(_)
                | Error::StationaryPointInTransition { .. }
                | Error::InsufficientRows { .. }
                | Error::Overflow
        )
    }
}
