use std::io;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("config parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: String, actual: String },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("cluster constraint violated: {0}")]
    ConstraintViolation(String),

    /// An enumeration or iteration guard tripped.
    #[error("budget exceeded ({guard}): {detail}")]
    BudgetExceeded { guard: &'static str, detail: String },

    #[error("max-min power control did not converge; best feasible SINR target {best_target}")]
    PowerControl { best_target: f64 },

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Process exit code used by the command line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Parse { .. } => 2,
            Error::BudgetExceeded { .. } | Error::PowerControl { .. } => 3,
            _ => 1,
        }
    }
}
