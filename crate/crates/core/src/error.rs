use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("empty period")]
    EmptyPeriod,
    #[error("word contains a digit other than 0 and 1")]
    NotBinary,
    #[error("word contains no letter {0}")]
    MissingLetter(u8),
    #[error("limit word prefix of length {requested} not reached (longest image has length {reached})")]
    NoStabilisation { requested: usize, reached: usize },
    #[error("no {0}-decoding exists")]
    NoDecoding(char),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("no sign change in bracket [{lo}, {hi}]")]
    NoBracket { lo: f64, hi: f64 },
    #[error("tolerance {tol} unattainable with prefix length {prefix_len}; need at least {required}")]
    PrefixTooShort { tol: f64, prefix_len: usize, required: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
