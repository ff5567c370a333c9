//! CLI error type with the exit-code mapping:
//! 0 success, 1 usage/configuration, 2 computation/convergence, 3 I/O.

use spdc_core::SpdcError;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Compute(String),
    Io(String),
}

pub type CliResult<T> = Result<T, CliError>;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Compute(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Compute(m) => write!(f, "computation error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl From<SpdcError> for CliError {
    fn from(e: SpdcError) -> Self {
        match e {
            SpdcError::Convergence { .. } | SpdcError::Truncation { .. } => {
                CliError::Compute(e.to_string())
            }
            SpdcError::Domain(_) | SpdcError::Config(_) | SpdcError::Range(_) => {
                CliError::Usage(e.to_string())
            }
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
