use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("empty frequency grid")]
    EmptyGrid,

    #[error("frequency grid is not strictly increasing at index {0}")]
    UnorderedGrid(usize),

    #[error("singular denominator (pole) at omega = {omega} rad/s")]
    Pole { omega: f64 },

    #[error("no isolation point found in (0, omega_rf)")]
    NoIsolationPoint,

    #[error("isolation root at omega_m = {omega_m} gives a negative (dC/2C0)^2")]
    InconsistentRoot { omega_m: f64 },

    #[error("solver did not converge: {0}")]
    NoConvergence(String),

    #[error("steady state did not converge: residual {residual:e} after {periods} periods")]
    Divergence { residual: f64, periods: usize },

    #[error("unsupported configuration: {0}")]
    Unsupported(String),
}

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParam { name, reason: reason.into() }
}
