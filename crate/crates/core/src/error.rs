use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {lhs:?} vs {rhs:?}")]
    DimensionMismatch {
        op: &'static str,
        lhs: (usize, usize),
        rhs: (usize, usize),
    },

    #[error("matrix is numerically singular (condition estimate {cond_estimate:.3e})")]
    Singular { cond_estimate: f64 },

    #[error("evaluation at a pole (z = {re} + {im}i)")]
    Pole { re: f64, im: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("coordinate out of range: {0}")]
    OutOfRange(String),

    #[error("non-canonical vector: {0}")]
    NonCanonical(String),

    #[error("non-FIR parameters: time-domain path requires all poles at zero")]
    NotFir,

    #[error("Stein series did not converge: {0}")]
    NonConvergence(String),

    #[error("evaluation failed at every retry for sample {index}")]
    SamplingExhausted { index: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
