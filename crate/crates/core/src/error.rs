use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("number-basis truncation did not converge (n_max {n_max}, relative change {change:.3e})")]
    TruncationNotConverged { n_max: usize, change: f64 },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("criterion is degenerate: Stokes commutator bound vanishes")]
    CriterionDegenerate,

    #[error("undefined reference: {0}")]
    UndefinedReference(String),

    #[error("target {target_db:.3} dB is unreachable; achievable range is [{min_db:.4}, {max_db:.4}] dB")]
    UnreachableTarget { target_db: f64, min_db: f64, max_db: f64 },

    #[error("json: {0}")]
    Json(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
