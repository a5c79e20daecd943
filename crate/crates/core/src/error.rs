use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// The response denominator vanished relative to the size of its terms.
    #[error(
        "DegenerateDenominator: |denominator| = {magnitude:e} is below the singularity floor (term scale {scale:e})"
    )]
    DegenerateDenominator { magnitude: f64, scale: f64 },

    #[error("DivisionByZero: {0}")]
    DivisionByZero(String),

    #[error("DegenerateParams: {0}")]
    DegenerateParams(String),

    /// Re(W10) = 0: no phase accumulates, so no interaction time realizes the target.
    #[error("ZeroPhaseRate: Re(W10) = 0, no phase accumulates at these parameters")]
    ZeroPhaseRate,

    #[error("InvalidInput: {0}")]
    InvalidInput(String),

    #[error("TruncationNotConverged: Poisson tail mass {tail_mass:e} exceeds {eps:e}")]
    TruncationNotConverged { tail_mass: f64, eps: f64 },

    #[error("StepSizeUnderflow: at t = {t:e} the integrator needs step {h:e}, too small to reach t_final; rescale units or loosen the tolerance")]
    StepSizeUnderflow { t: f64, h: f64 },

    #[error("NoConvergence: {0}")]
    NoConvergence(String),

    #[error("NotAttainable: target error {delta_target} is below the attainable floor {floor:e}")]
    NotAttainable { delta_target: f64, floor: f64 },
}

impl Error {
    /// Variant name, used for per-row status fields.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::DivisionByZero(_) => "DivisionByZero",
            Error::DegenerateParams(_) => "DegenerateParams",
            Error::ZeroPhaseRate => "ZeroPhaseRate",
            Error::InvalidInput(_) => "InvalidInput",
            Error::TruncationNotConverged { .. } => "TruncationNotConverged",
            Error::StepSizeUnderflow { .. } => "StepSizeUnderflow",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NotAttainable { .. } => "NotAttainable",
        }
    }
}
