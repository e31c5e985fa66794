use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("infeasible host: {0}")]
    InfeasibleHost(String),
    #[error("random-regular sampling gave up after {0} restarts")]
    RegularSampling(usize),
    #[error("invalid graph: {0}")]
    InvalidGraph(String),
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{colors} distinct colors exceeds the enumeration limit of {limit}")]
    EnumerationGuard { colors: usize, limit: usize },
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
