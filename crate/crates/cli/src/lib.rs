//! Example registry, input loading and check suites behind the `qact`
//! binary.

use std::fmt;

use serde::Serialize;

pub mod checks;
pub mod examples;
pub mod input;
pub mod report;
pub mod suite;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_ASSERT_TOL: f64 = 1e-7;
pub const DEFAULT_SEED: u64 = 7;
pub const DEFAULT_TRUNCATION: usize = 6;

/// Numerical knobs shared by every command. `tol` is the linear-algebra rank
/// cutoff; `assert_tol` bounds theorem-level residuals.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Settings {
    pub seed: u64,
    pub tol: f64,
    pub assert_tol: f64,
    pub truncation: usize,
}

impl Default for Settings {
    fn default() -> Self {
        Settings { seed: DEFAULT_SEED, tol: DEFAULT_TOL, assert_tol: DEFAULT_ASSERT_TOL, truncation: DEFAULT_TRUNCATION }
    }
}

#[derive(Debug)]
pub enum CliError {
    /// Unreadable or malformed input (exit 2).
    Parse(String),
    /// Input that parses but fails validation (exit 3).
    Invalid(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Invalid(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Parse(m) => write!(f, "parse error: {m}"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<qact_core::Error> for CliError {
    fn from(e: qact_core::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}
