//! Failures and their process exit codes.

use std::fmt;
use std::path::Path;

use cliffrac_core::Error;

/// Invalid parameters or usage.
pub const EXIT_PARAMS: i32 = 2;
/// Missing, unreadable or malformed files.
pub const EXIT_IO: i32 = 3;
/// A fit's standard error exceeds `--max-stderr`.
pub const EXIT_FIT: i32 = 4;
/// The solvability gate rejected the problem.
pub const EXIT_GATE: i32 = 5;
/// Jump verification failed the tolerance.
pub const EXIT_VERIFY: i32 = 6;
/// Any other numerical failure.
pub const EXIT_NUMERIC: i32 = 1;

#[derive(Debug)]
pub enum Failure {
    Params(String),
    Io(String),
    Fit(String),
    Gate { margin: f64 },
    Verify(String),
    Numeric(String),
}

impl Failure {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::Io(format!("{}: {e}", path.display()))
    }

    pub fn code(&self) -> i32 {
        match self {
            Failure::Params(_) => EXIT_PARAMS,
            Failure::Io(_) => EXIT_IO,
            Failure::Fit(_) => EXIT_FIT,
            Failure::Gate { .. } => EXIT_GATE,
            Failure::Verify(_) => EXIT_VERIFY,
            Failure::Numeric(_) => EXIT_NUMERIC,
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Params(m) => write!(f, "invalid parameter: {m}"),
            Failure::Io(m) => write!(f, "i/o error: {m}"),
            Failure::Fit(m) => write!(f, "fit quality: {m}"),
            Failure::Gate { margin } => write!(f, "solvability gate rejected the problem: margin {margin:.6}"),
            Failure::Verify(m) => write!(f, "verification failed: {m}"),
            Failure::Numeric(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(m) => Failure::Params(m),
            Error::DimensionTooLarge { .. }
            | Error::DimensionMismatch { .. }
            | Error::GeneratorOutOfRange { .. }
            | Error::GridTooLarge { .. }
            | Error::OutOfRange { .. }
            | Error::MissingComponent(_)
            | Error::ZeroParavector => Failure::Params(e.to_string()),
            Error::Io(_) | Error::Json(_) | Error::Format(_) => Failure::Io(e.to_string()),
            Error::GateRejected { margin } => Failure::Gate { margin },
            _ => Failure::Numeric(e.to_string()),
        }
    }
}
