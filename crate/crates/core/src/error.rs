use alloc::string::String;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("degenerate metric")]
    DegenerateMetric,
    #[error("dimension {0} unsupported: need n >= 3")]
    Dimension(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("trace mismatch: R = {given}, trace(Ric) = {computed}")]
    TraceMismatch { given: f64, computed: f64 },
    #[error("tensor is not trace-free (trace {0:e})")]
    NotTraceFree(f64),
    #[error("tolerance must be positive, got {0}")]
    NonPositiveTolerance(f64),
    #[error("insufficient stencil margin on axis {axis}")]
    StencilMargin { axis: usize },
    #[error("identity requires n >= 4")]
    NeedsDimensionFour,
    #[error("not a trace-free Codazzi field (trace {trace:e}, Codazzi defect {codazzi:e})")]
    NotTraceFreeCodazzi { trace: f64, codazzi: f64 },
    #[error("vanishing locus: |T| = {0:e}")]
    VanishingLocus(f64),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error("scalar curvature must be positive, got {0}")]
    NonPositiveCurvature(f64),
    #[error("no periodic orbit: C = {c} outside (0, {c_max})")]
    NoPeriodicOrbit { c: f64, c_max: f64 },
    #[error("integrator tolerance not met: {quantity} defect {defect:e}")]
    Integrator { quantity: &'static str, defect: f64 },
    #[error("grid size {0} too small (need at least 64)")]
    GridTooSmall(usize),
    #[error("hypothesis violated: scalar curvature spread {spread:e} over samples")]
    HypothesisViolated { spread: f64 },
    #[error("epsilon must be positive, got {0}")]
    NonPositiveEpsilon(f64),
    #[error("operation needs a product or warped model")]
    WrongKind,
}

pub type Result<T> = core::result::Result<T, Error>;
