//! Front end for `eit-gate`: configuration, the four subcommands and their
//! tabular output. The binary is a thin wrapper around [`commands::run`].

pub mod commands;
pub mod config;
pub mod table;

pub use commands::{run, Command, Report};
pub use config::{Format, RunConfig};
pub use table::{Cell, Table};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const CONFIG: i32 = 2;
    pub const MATH: i32 = 3;
    pub const ORACLE_BOUND: i32 = 4;
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Io(String),
    #[error("{op}: {source}")]
    Math {
        op: &'static str,
        #[source]
        source: eit_core::Error,
    },
    #[error("monotonicity audit failed: {0}")]
    Audit(String),
    #[error("oracle bound violated: {0}")]
    OracleBound(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => exit::CONFIG,
            // Rejected inputs are configuration errors wherever they are detected.
            CliError::Math {
                source: eit_core::Error::InvalidInput(_),
                ..
            } => exit::CONFIG,
            CliError::Math { .. } | CliError::Audit(_) => exit::MATH,
            CliError::OracleBound(_) => exit::ORACLE_BOUND,
        }
    }
}

pub(crate) fn math(op: &'static str) -> impl FnOnce(eit_core::Error) -> CliError {
    move |source| CliError::Math { op, source }
}
