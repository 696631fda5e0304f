use thiserror::Error;

/// Errors surfaced by the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A model parameter is outside its physical domain.
    #[error("parameter out of domain: {0}")]
    ParamDomain(String),

    /// Grid construction rejected the requested layout.
    #[error("invalid grid: {0}")]
    GridConfig(String),

    /// A field was passed in the wrong representation (spectral vs physical).
    #[error("representation mismatch: expected {expected}, got {got}")]
    RepresentationMismatch {
        expected: &'static str,
        got: &'static str,
    },

    /// Fields living on different grids were combined.
    #[error("grid mismatch between operands")]
    GridMismatch,

    /// Initial data violates an admissibility hypothesis (zero-mean surrogate).
    #[error("inadmissible data: {0}")]
    DataInadmissible(String),

    /// Input momentum is not divergence-free where a solenoidal field is required.
    #[error("input is not solenoidal: max |xi.m_hat| / ||m|| = {defect:.3e}")]
    NotSolenoidal { defect: f64 },

    /// Adaptive quadrature failed to converge within the refinement budget.
    #[error("quadrature did not converge: last relative change {last_change:.3e}")]
    QuadratureNoConvergence { last_change: f64 },

    /// A closed-form accumulation produced a non-finite value.
    #[error("non-finite accumulation in {0}")]
    NonFinite(&'static str),

    /// Too few samples inside a fit window.
    #[error("degenerate fit window [{lo}, {hi}]: {count} samples (need >= {need})")]
    DegenerateFitWindow {
        lo: f64,
        hi: f64,
        count: usize,
        need: usize,
    },

    /// An operation that assumes the normalized coefficients was called without them.
    #[error("operation requires normalized coefficients nu + nu_tilde = 1, gamma = 1; got nu + nu_tilde = {sum}, gamma = {gamma}")]
    NotNormalized { sum: f64, gamma: f64 },

    /// Time horizon exceeds what the periodic box can support.
    #[error("horizon guard violated: T = {t} > 0.05 (L/pi)^2 / nu = {limit}")]
    HorizonGuard { t: f64, limit: f64 },

    /// Negative or otherwise invalid evolution time.
    #[error("invalid time argument: {0}")]
    InvalidTime(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
