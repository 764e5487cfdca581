use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("pole of the Gamma function at x = {0}")]
    Pole(f64),
    #[error("integrand returned a non-finite value at t = {0}")]
    NonFinite(f64),
    #[error("grid step {step} is not below half the interval length {half}")]
    Step { step: f64, half: f64 },
    #[error("series did not reach tolerance within {0} terms")]
    Convergence(usize),
    #[error("cancellation in the series leaves relative accuracy {0:e}")]
    Precision(f64),
    #[error("expression variant mismatch: expected {expected}")]
    Variant { expected: &'static str },
    #[error("length mismatch: {0}")]
    Length(&'static str),
    #[error("singular point: {0}")]
    SingularPoint(&'static str),
    #[error("invalid parameters: {0}")]
    Parameter(&'static str),
    #[error("order error: {0}")]
    Order(&'static str),
    #[error("|1 + hbar| = {0} is outside the convergence region |1 + hbar| < 1")]
    ConvergenceRegion(f64),
    #[error("invalid psi function: {0}")]
    InvalidPsi(&'static str),
    #[error("oracle mismatch at order {order}, time power {power}: expected {expected}, got {actual}")]
    Mismatch {
        order: usize,
        power: u32,
        expected: f64,
        actual: f64,
    },
    #[error("series structure: {0}")]
    Structure(&'static str),
}
