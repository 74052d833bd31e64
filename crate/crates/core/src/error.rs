use thiserror::Error as ThisError;

#[derive(Debug, ThisError)]
pub enum Error {
    #[error("inadmissible theta block: {0}")]
    Inadmissible(String),
    #[error("coefficient outside cached range (need D = {needed}, have {have})")]
    CacheMiss { needed: i64, have: i64 },
    #[error("division is not exact: {0}")]
    InexactDivision(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent data: {0}")]
    Inconsistent(String),
    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("singular system: {0}")]
    Singular(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
