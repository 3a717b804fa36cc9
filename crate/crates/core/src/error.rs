use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("cannot parse {token:?}: {reason}")]
    Parse { token: String, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("scenario mismatch: {0}")]
    ScenarioMismatch(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error(
        "scenario too large: {coords} coordinates exceeds the enumeration ceiling of {ceiling}"
    )]
    TooLarge { coords: usize, ceiling: usize },

    #[error("synthesis infeasible: {0}")]
    SynthesisInfeasible(String),

    #[error("unknown preset {0:?}")]
    UnknownPreset(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn parse(token: &str, reason: &str) -> Self {
        Error::Parse {
            token: token.to_owned(),
            reason: reason.to_owned(),
        }
    }
}
