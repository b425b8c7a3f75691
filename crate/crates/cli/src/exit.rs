//! Error wrapper and stable exit codes.
//!
//! 0 success; 1 I/O or internal; 2 no WC root; 3 domain/argument value
//! errors; 4 infeasible optimization; 5 singular design or reference;
//! 6 separation in fitting; 7 malformed data file; 64 usage errors.

use quantal_design::Error;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Usage(String),
    Io(std::io::Error),
    Json(serde_json::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Json(e) => write!(f, "{e}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Json(e)
    }
}

pub fn exit_code(e: &CliError) -> i32 {
    match e {
        CliError::Core(core) => match core {
            Error::NoRoot { .. } | Error::NoValidRoot { .. } | Error::SingularW { .. } => 2,
            Error::Domain { .. }
            | Error::Overflow { .. }
            | Error::NotSymmetric(_)
            | Error::Pole { .. }
            | Error::CoincidentPoints { .. }
            | Error::Inversion(_) => 3,
            Error::Infeasible(_) => 4,
            Error::Singular { .. } => 5,
            Error::Separation { .. } => 6,
            Error::InvalidData { .. } => 7,
            Error::InvalidParameter(_) | Error::InvalidDesign(_) => 64,
        },
        CliError::Usage(_) => 64,
        CliError::Io(_) | CliError::Json(_) => 1,
    }
}
