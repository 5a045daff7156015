use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("drift matrix is not Hurwitz stable (spectral abscissa {abscissa:e})")]
    UnstableDrift { abscissa: f64 },
    #[error("linear system is singular")]
    SingularSystem,
    #[error("step size underflow at t = {t:e}")]
    StepSizeUnderflow { t: f64 },
    #[error("{what} did not converge")]
    NonConvergent { what: &'static str },
    #[error("unstable regime: G+ = {g_plus:e} >= G- = {g_minus:e}")]
    UnstableRegime { g_plus: f64, g_minus: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unphysical state: smallest symplectic eigenvalue {nu_min:e}")]
    UnphysicalState { nu_min: f64 },
    #[error("state is not TTMSS-like (2|c_ab| >= c_a + c_b)")]
    NotTTMSSLike,
    #[error("closed forms require symmetric damping and occupation")]
    AsymmetricParams,
    #[error("degenerate denominator in peak formula")]
    DegenerateDenominator,
    #[error("negative occupation {value:e} from spectrum inversion")]
    NegativeOccupation { value: f64 },
    #[error("invalid parameter {name}: {reason}")]
    InvalidParameter { name: &'static str, reason: &'static str },
    #[error("non-finite entries in input matrix")]
    NonFinite,
}

pub type Result<T> = core::result::Result<T, Error>;
