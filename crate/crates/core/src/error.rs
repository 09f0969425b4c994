use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("not a complex: d^{0} composed with d^{1} is nonzero")]
    NotAComplex(i64, i64),
    #[error("cohomology in degree {0} is infinite")]
    InfiniteCohomology(i64),
    #[error("trivialization is singular")]
    SingularTrivialization,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("no rational function fits the counts: {0}")]
    NoFit(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Invalid(msg.into()))
}
