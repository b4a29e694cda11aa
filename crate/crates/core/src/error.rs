use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("value {value:e} outside the range of kappa, ln-range is ({lo:e}, {hi:e})")]
    Range { value: f64, lo: f64, hi: f64 },

    #[error(
        "ln kappa is not increasing on ({lo:e}, {hi:e}); admissible interval is ({adm_lo:e}, {adm_hi:e})"
    )]
    Monotonicity {
        lo: f64,
        hi: f64,
        adm_lo: f64,
        adm_hi: f64,
    },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("node at index {index} (x = {x}): density {rho:e} below floor inside the support")]
    Node { index: usize, x: f64, rho: f64 },

    #[error("integration failed at step {step} (t = {t}): {reason}")]
    Integration { step: usize, t: f64, reason: String },

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("scenario validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),
}

pub type Result<T> = std::result::Result<T, Error>;
