use thiserror::Error;

use crate::linalg::LinalgError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("system is unstable: largest drift eigenvalue real part {max_real_part:e}")]
    Unstable { max_real_part: f64 },
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("state is unphysical: {0}")]
    Unphysical(String),
    #[error("frequency collision: {}", .0.join(", "))]
    FrequencyCollision(Vec<String>),
    #[error("domain error: {0}")]
    Domain(String),
}

impl Error {
    pub(crate) fn invalid(field: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            field,
            reason: reason.into(),
        }
    }
}
