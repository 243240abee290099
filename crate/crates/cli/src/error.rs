use std::fmt;

/// Exit codes reported by the `gevp` binary.
pub mod exit {
    pub const OK: u8 = 0;
    /// Unreadable or invalid configuration, input files, or output location.
    pub const CONFIG: u8 = 2;
    /// The numerical method failed (singular metric, collapse into the null space of B, ...).
    pub const NUMERICAL: u8 = 3;
    /// A level required to converge reached `tau_max` first.
    pub const CONVERGENCE: u8 = 4;
}

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Solver(gevp_core::Error),
    Convergence(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => exit::CONFIG,
            CliError::Solver(e) if e.is_numerical() => exit::NUMERICAL,
            CliError::Solver(_) => exit::CONFIG,
            CliError::Convergence(_) => exit::CONVERGENCE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "configuration error: {msg}"),
            CliError::Solver(e) if e.is_numerical() => write!(f, "numerical failure: {e}"),
            CliError::Solver(e) => write!(f, "invalid input: {e}"),
            CliError::Convergence(msg) => write!(f, "convergence failure: {msg}"),
        }
    }
}

impl From<gevp_core::Error> for CliError {
    fn from(e: gevp_core::Error) -> Self {
        CliError::Solver(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_context<T>(r: std::io::Result<T>, what: impl fmt::Display) -> CliResult<T> {
    r.map_err(|e| CliError::Config(format!("{what}: {e}")))
}
