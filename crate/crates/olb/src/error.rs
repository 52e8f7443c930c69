//! Error taxonomy. Degenerate inputs and failed branch selections are reported,
//! never clamped or silently resolved.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Error, Debug)]
pub enum Error {
    #[error("point lies inside the curve or within {margin:e} of its boundary")]
    PointInsideCurve { margin: f64 },
    #[error("reference origin lies outside the curve")]
    OriginOutside,
    #[error("curve fails strict convexity: min(p + p'') = {min:e} at alpha = {alpha}")]
    NotConvex { alpha: f64, min: f64 },
    #[error("support function not positive about the chosen origin")]
    SupportNotPositive,
    #[error("no admissible tangent circle: {0}")]
    NoCircle(&'static str),
    #[error("tangent branch selection ambiguous: {candidates} admissible roots")]
    BranchAmbiguity { candidates: usize },
    #[error("root search found no sign change in the bracket")]
    NoRoot,
    #[error("tangent lines are parallel; configuration has no apex")]
    ParallelTangents,
    #[error("point lies on the segment axis; endpoint alternation undefined")]
    OnAxis,
    #[error("family parameter must be positive, got {0}")]
    NonPositiveT(f64),
    #[error("point is not on the expected curve (residual {0:e})")]
    OffCurve(f64),
    #[error("point coincides with the reference origin")]
    AtOrigin,
    #[error("orbit too short for this operation (need at least {need} points)")]
    TooShort { need: usize },
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },
    #[error("extrapolation estimates disagree ({rel:e} relative); limit not trusted")]
    ExtrapolationUnstable { rel: f64 },
    #[error("angular coefficient f vanishes (|f| = {0:e}); chart change undefined")]
    SingularF(f64),
    #[error("orbit fails the periodicity check (residual {0:e})")]
    NotPeriodic(f64),
    #[error("no convergence after {sweeps} sweeps (gradient norm {grad:e})")]
    NoConvergence { sweeps: usize, grad: f64 },
    #[error("configuration degenerated: fan angle left (0, pi) at index {index}")]
    DegenerateConfig { index: usize },
    #[error("empty input")]
    EmptyInput,
    #[error("step {index} failed: {source}")]
    StepFailed {
        index: usize,
        #[source]
        source: Box<Error>,
    },
    #[error("table spec parse error: {0}")]
    SpecParse(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("report serialization failed: {0}")]
    Serialize(#[from] serde_json::Error),
}

impl Error {
    /// Tags failures of iterative numerics, mapped to a dedicated process exit code.
    pub fn is_nonconvergence(&self) -> bool {
        matches!(
            self,
            Error::NoRoot
                | Error::ExtrapolationUnstable { .. }
                | Error::NoConvergence { .. }
                | Error::DegenerateConfig { .. }
                | Error::BranchAmbiguity { .. }
                | Error::NoCircle(_)
        ) || matches!(self, Error::StepFailed { source, .. } if source.is_nonconvergence())
    }

    pub fn at_step(self, index: usize) -> Error {
        Error::StepFailed {
            index,
            source: Box::new(self),
        }
    }
}
