//! Scriptable front end: every command is deterministic given its full flag
//! set, writes data files plus a metadata sidecar, and exits 0 on success,
//! 2 on a usage error, 3 on a numerical-invariant violation.

use std::fmt;

pub mod args;
pub mod commands;
pub mod output;

pub use args::{Cli, Command};

/// Environment variable holding the default output directory.
pub const OUT_DIR_ENV: &str = "TWOPHOTON_OUT_DIR";

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or parameter values; exit code 2.
    Usage(String),
    /// A numerical invariant (unitarity, positivity, trace) failed; exit 3.
    Invariant(String),
    /// Filesystem or serialization failure; exit 1.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Invariant(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(msg) => write!(f, "usage error: {msg}"),
            CliError::Invariant(msg) => write!(f, "numerical invariant violated: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<twophoton::Error> for CliError {
    fn from(error: twophoton::Error) -> Self {
        use twophoton::Error::*;
        match error {
            ModeCountTooSmall(_) | ModeOutOfRange { .. } | DegeneratePair(..)
            | DimensionMismatch { .. } | ParameterOutOfRange { .. } | EmptyPostSelection(_)
            | ZeroNorm => CliError::Usage(error.to_string()),
            NotUnitary { .. } | NotLossless | NotHermitian { .. } | BadTrace { .. }
            | NotPositive { .. } | InvariantViolation(_) => {
                CliError::Invariant(error.to_string())
            }
            Io(_) | Json(_) => CliError::Io(error.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(error: std::io::Error) -> Self {
        CliError::Io(error.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(error: serde_json::Error) -> Self {
        CliError::Io(error.to_string())
    }
}

/// Execute one parsed command; returns the paths written.
pub fn run(cli: &Cli) -> Result<Vec<std::path::PathBuf>, CliError> {
    match &cli.command {
        Command::StateDump(cmd) => commands::state_dump(cmd),
        Command::HomSweep(cmd) => commands::hom_sweep(cmd),
        Command::Fringe(cmd) => commands::fringe(cmd),
        Command::DiscordSweep(cmd) => commands::discord_sweep(cmd),
        Command::DiscordMax(cmd) => commands::discord_max(cmd),
        Command::NoisyCurve(cmd) => commands::noisy_curve(cmd),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes_follow_the_error_class() {
        let usage: CliError = twophoton::Error::ParameterOutOfRange {
            name: "gamma",
            value: -1.0,
            range: "[0, inf)",
        }
        .into();
        assert_eq!(usage.exit_code(), 2);
        let invariant: CliError = twophoton::Error::NotPositive { eigenvalue: -0.2 }.into();
        assert_eq!(invariant.exit_code(), 3);
        let invariant: CliError =
            twophoton::Error::InvariantViolation("drift".into()).into();
        assert_eq!(invariant.exit_code(), 3);
        let io: CliError = std::io::Error::other("disk").into();
        assert_eq!(io.exit_code(), 1);
    }
}
