use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("brute-force cap exceeded: {what} is {size}, cap {cap}")]
    CapExceeded { what: String, size: u64, cap: u64 },
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("no convergence after {iterations} iterations (best bound {best_bound})")]
    NonConvergence { iterations: usize, best_bound: String },
    #[error("stage {stage}: {message}")]
    Stage { stage: &'static str, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn cap_check(what: &str, size: u64, cap: u64) -> Result<()> {
    if size > cap {
        Err(Error::CapExceeded { what: what.to_string(), size, cap })
    } else {
        Ok(())
    }
}
