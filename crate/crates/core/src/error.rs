use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    ParameterDomain(String),

    #[error("{what} {value} out of range 1..={limit}")]
    OutOfRange {
        what: &'static str,
        value: u64,
        limit: u64,
    },

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error("brute-force enumeration refused for limit {limit} (maximum {max})")]
    CostGuard { limit: usize, max: usize },

    #[error("sampler exceeded {0} steps without termination")]
    NonTermination(u64),

    #[error("variate overflowed the 64-bit range")]
    Overflow,

    #[error("moment condition violated: {0}")]
    MomentCondition(String),

    #[error("empty dataset: {0}")]
    EmptyDataset(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("value out of domain at line {line}: {message}")]
    ValueDomain { line: u64, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
