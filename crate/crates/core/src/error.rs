use thiserror::Error;

/// Errors raised across the simulator, circuit builders and solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("index {index} out of range for {len} entries")]
    Index { index: usize, len: usize },

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("register layout: {0}")]
    Layout(String),

    #[error("resource limit: {0}")]
    Resource(String),

    #[error("transpile: {0}")]
    Transpile(String),

    #[error("gate count: {0}")]
    Count(String),

    #[error("polynomial fit: {0}")]
    Fit(String),

    #[error("encoding: {0}")]
    Encoding(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("lifting: {0}")]
    Lift(String),

    #[error("configuration: {0}")]
    Config(String),

    #[error("postselection: success branch norm {0:e} is below threshold")]
    Postselection(f64),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
