//! Library side of the `secexp` command: spec ingestion and the CSV
//! producing commands. The binary only parses arguments and maps errors to
//! exit codes.

pub mod commands;
pub mod spec;

use thiserror::Error;

/// Process exit codes. Stable contract.
pub mod exit {
    pub const SUCCESS: i32 = 0;
    pub const IO: i32 = 1;
    /// Invalid or degenerate input, including zero mutual information.
    pub const DEGENERATE: i32 = 2;
    pub const BUDGET: i32 = 3;
    pub const NUMERICAL: i32 = 4;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("invalid spec: {0}")]
    Spec(String),
    #[error("invalid arguments: {0}")]
    Args(String),
    #[error(transparent)]
    Core(#[from] secexp::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use secexp::Error as E;
        match self {
            CliError::Io(_) => exit::IO,
            CliError::Spec(_) | CliError::Args(_) => exit::DEGENERATE,
            CliError::Core(E::BudgetExceeded { .. }) => exit::BUDGET,
            CliError::Core(E::Numerical(_)) => exit::NUMERICAL,
            CliError::Core(_) => exit::DEGENERATE,
        }
    }
}

/// Output units. Values are computed in nats and converted on output only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Units {
    #[default]
    Nats,
    Bits,
}

impl Units {
    pub fn scale(self, nats: f64) -> f64 {
        match self {
            Units::Nats => nats,
            Units::Bits => nats / std::f64::consts::LN_2,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Units::Nats => "nats",
            Units::Bits => "bits",
        }
    }
}
