use thiserror::Error;

/// Errors shared by every numeric module in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("pole within guard radius at x = {x}")]
    Pole { x: f64 },
    #[error("map singularity at x = {x}")]
    Singularity { x: f64 },
    #[error("branch boundary at x = {x}")]
    Breakpoint { x: f64 },
    #[error("y = {y} is outside the image of branch {branch}")]
    OutOfImage { branch: usize, y: f64 },
    #[error("family `{0}` has no catalog conjugator")]
    NoConjugator(&'static str),
    #[error("domain is already bounded; nothing to compactify")]
    AlreadyBounded,
    #[error("domains do not match")]
    DomainMismatch,
    #[error("power iteration did not converge; last L1 change {last_change:e}")]
    NonConvergence { last_change: f64 },
    #[error("integral did not stabilize under refinement; drift {drift:e}")]
    NonIntegrable { drift: f64 },
    #[error("orbit left the domain at step {step} (x = {x})")]
    OrbitEscape { step: usize, x: f64 },
    #[error("orbit hit a singular point at step {step} (x = {x})")]
    OrbitSingular { step: usize, x: f64 },
    #[error("orbit is degenerate (trapped at x = {x})")]
    DegenerateOrbit { x: f64 },
    #[error("x = {x} is not a fixed point (|T(x)-x| = {residual:e})")]
    NotFixedPoint { x: f64, residual: f64 },
    #[error("resonant multiplier: lambda^{n} == lambda")]
    Resonance { n: u32 },
    #[error("multiplier |lambda| = {lambda_abs} is not admissible (must avoid 0 and 1)")]
    BadMultiplier { lambda_abs: f64 },
    #[error("too many skipped iterates: {skipped} of {total}")]
    TooManySkips { skipped: usize, total: usize },
    #[error("root finder failed to converge: {0}")]
    RootFind(String),
}

pub type Result<T> = std::result::Result<T, Error>;
