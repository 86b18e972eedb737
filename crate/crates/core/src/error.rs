use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A kernel description failed validation (bad parameters, wrong mass, ...).
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    /// The requested quantity is not available for this kernel family.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A numerical routine failed to reach its target accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// Invalid user input (CLI arguments, config files, ranges).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// The contraction factor is not < 1, so the iteration count is undefined.
    #[error("diagnostic out of range: {0}")]
    DiagnosticOutOfRange(String),

    /// A simulation would exceed its configured resource budget.
    #[error("resource guard: {0}")]
    ResourceGuard(String),

    /// The percolation probability curve never crosses 1/2 on the given grid.
    #[error("no crossing: {0}")]
    NoCrossing(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serde(#[from] serde_json::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code: 1 for usage/validation problems, 2 for numerical ones.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidKernel(_) | Error::InvalidInput(_) | Error::Unsupported(_) => 1,
            _ => 2,
        }
    }
}
