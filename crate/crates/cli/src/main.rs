mod args;
mod commands;
mod table;

use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::Parser;
use forerunner_core::{Error, CONSTANTS};

use args::{Cli, Command, Invocation};

const CONFIG_PREFIX: &str = "# config: ";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] Error),
    #[error("invalid arguments: {0}")]
    Usage(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("cannot replay: {0}")]
    Replay(String),
}

impl CliError {
    /// Distinct nonzero status per failure class; 2 is left to argument parsing.
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(Error::TunnelingRegime { .. }) => 3,
            CliError::Core(Error::Domain(_) | Error::NonFinite(_) | Error::Singular(_)) => 4,
            CliError::Core(
                Error::PoleSearch { .. }
                | Error::Seeding(_)
                | Error::Normalization { .. }
                | Error::Truncation { .. }
                | Error::PoleTable { .. }
                | Error::Quadrature { .. }
                | Error::Numerical(_),
            ) => 5,
            CliError::Core(
                Error::UndefinedFrequency { .. }
                | Error::MonotonicSignal { .. }
                | Error::Fit(_)
                | Error::MissingDependency(_)
                | Error::NoTransition { .. },
            ) => 6,
            CliError::Core(Error::DomainTruncation { .. }) => 7,
            CliError::Io(_) => 8,
            CliError::Replay(_) => 9,
        }
    }
}

fn load_config(csv: &Path) -> Result<Command, CliError> {
    let text = std::fs::read_to_string(csv)?;
    let line = text
        .lines()
        .find_map(|l| l.strip_prefix(CONFIG_PREFIX))
        .ok_or_else(|| CliError::Replay(format!("{} has no config line", csv.display())))?;
    serde_json::from_str(line).map_err(|e| CliError::Replay(e.to_string()))
}

fn execute(cli: &Cli) -> Result<(), CliError> {
    let command = match &cli.invocation {
        Invocation::Run(c) => c.clone(),
        Invocation::Replay { csv } => load_config(csv)?,
    };
    let table = commands::run(&command)?;
    let config = serde_json::to_string(&command).map_err(|e| CliError::Replay(e.to_string()))?;
    let preamble = vec![
        format!("forerunner {} {}", env!("CARGO_PKG_VERSION"), command.name()),
        format!("{}{config}", &CONFIG_PREFIX[2..]),
        format!(
            "constants: hbar = {:e} eV fs, hbar^2/m_e = {:e} eV nm^2",
            CONSTANTS.hbar, CONSTANTS.hbar_sq_over_me
        ),
    ];
    let text = table.render(&preamble);
    match &cli.out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut out = std::io::stdout().lock();
            match out.write_all(text.as_bytes()).and_then(|_| out.flush()) {
                // a reader that stops early (head, less) is not an error
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => {}
                other => other?,
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("forerunner: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
