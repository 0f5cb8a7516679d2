use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature did not converge: value {value:e}, error estimate {error_estimate:e}")]
    NonConvergence { value: f64, error_estimate: f64 },

    #[error(
        "work paths disagree: heat sum {heat_sum:e} vs grand potential {grand:e} (allowed {allowed:e})"
    )]
    Inconsistent {
        heat_sum: f64,
        grand: f64,
        allowed: f64,
    },
}
