use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument error: {0}")]
    Argument(String),
    #[error("configuration error: {0}")]
    Config(String),
    #[error("structure error: {0}")]
    Structure(String),
    #[error("numeric error: {message} (achieved estimate {estimate:e})")]
    Numeric { message: String, estimate: f64 },
    #[error("capability error: {0}")]
    Capability(String),
    #[error("input error: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
