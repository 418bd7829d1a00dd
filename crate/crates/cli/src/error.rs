use submod_core::Error as CoreError;
use thiserror::Error;

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const INFEASIBLE: i32 = 2;
    pub const BOUND_VIOLATION: i32 = 3;
    pub const PARSE: i32 = 4;
    pub const CAP_REFUSAL: i32 = 5;
}

#[derive(Debug, Error)]
pub enum CliError {
    /// `line` is 1-based; `field` is a JSON path such as `objective.agents[1].weights`.
    #[error("line {line}, field `{field}`: {message}")]
    Parse { line: usize, field: String, message: String },
    #[error("algorithm `{algorithm}` cannot run on this instance ({reason}); valid here: {}", valid.join(", "))]
    Incompatible { algorithm: String, reason: String, valid: Vec<String> },
    #[error("unknown algorithm `{0}`; known: {known}", known = crate::run::ALGORITHMS.join(", "))]
    UnknownAlgorithm(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("{0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } => exit::PARSE,
            CliError::Core(CoreError::Infeasible(_)) => exit::INFEASIBLE,
            CliError::Core(CoreError::CapExceeded { .. }) => exit::CAP_REFUSAL,
            _ => exit::FAILURE,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
