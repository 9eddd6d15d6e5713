//! Exit codes.

use std::fmt;
use std::path::Path;

use oscq::Error;

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_SOLVER: i32 = 2;
pub const EXIT_INDETERMINATE: i32 = 3;
pub const EXIT_DOMAIN: i32 = 4;

#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn domain(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_DOMAIN, message: msg.into() }
    }

    pub fn solver(msg: impl Into<String>) -> Self {
        Failure { code: EXIT_SOLVER, message: msg.into() }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        Failure::solver(format!("{}: {e}", path.display()))
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Indeterminate { .. } => EXIT_INDETERMINATE,
            Error::Domain(_) | Error::InvalidInput(_) | Error::Pole(_) => EXIT_DOMAIN,
            Error::NoConvergence { .. } | Error::Quadrature { .. } | Error::Solver(_) | Error::EmptySet(_) => EXIT_SOLVER,
        };
        Failure { code, message: e.to_string() }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}
