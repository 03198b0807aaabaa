use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("gate is not unitary (max deviation from identity {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("projection failed: outcome probability {probability:.3e} is below threshold")]
    ProjectionFailed { probability: f64 },

    #[error("capability exceeded: {0}")]
    Capability(String),

    #[error("degenerate Richardson ratio: r = {0}")]
    DegenerateRatio(f64),

    #[error("filter targets cover the whole support; nothing survives")]
    NothingSurvives,

    #[error("filter annihilates state: success probability {probability:.3e}")]
    FilterAnnihilates { probability: f64 },

    #[error("reconstruction failed for sector {sector}: {reason}")]
    Reconstruction { sector: i64, reason: String },

    #[error("numerical check failed: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
