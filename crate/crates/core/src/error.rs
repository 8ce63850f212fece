use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An adaptive accumulator is zero where the stepsize formula divides by it.
    #[error("degenerate state: {0}")]
    DegenerateState(String),

    #[error("infeasible condition: {0}")]
    Infeasible(String),

    #[error("config error at line {line}: {msg}")]
    ConfigLine { line: usize, msg: String },

    #[error("config error: {0}")]
    Config(String),

    #[error("no experiments declared")]
    NoExperiments,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for errors caused by the experiment description rather than by I/O.
    pub fn is_config(&self) -> bool {
        matches!(
            self,
            Error::ConfigLine { .. }
                | Error::Config(_)
                | Error::NoExperiments
                | Error::InvalidParameter(_)
                | Error::InvalidArgument(_)
                | Error::Infeasible(_)
        )
    }
}
