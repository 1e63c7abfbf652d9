use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("step size underflow at x = {x} (h = {h:e}); field too stiff")]
    StepSizeUnderflow { x: f64, h: f64 },

    #[error("step limit exceeded at x = {x}")]
    StepLimit { x: f64 },

    #[error("invalid integrator config: {0}")]
    InvalidConfig(String),

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("orbit escaped unexpectedly near x = {0}")]
    UnexpectedEscape(f64),

    #[error("displacement derivative under-resolved: {0}")]
    Resolution(String),

    #[error("bifurcation curve data missing: {0}")]
    NeedsCurves(String),

    #[error("continuation branch lost at b = {0} without fold detection")]
    ContinuationGap(f64),

    #[error("no sign-change bracket: {0}")]
    NoBracket(String),
}

pub type Result<T> = std::result::Result<T, Error>;
