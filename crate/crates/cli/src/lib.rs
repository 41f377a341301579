//! The `shp` command-line driver.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::io::Write;
use std::path::{Path, PathBuf};

pub use args::{Cli, Command, Common, EvolveMode, Format};
pub use commands::Outcome;
pub use error::CliError;

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let common = &cli.common;
    match &cli.command {
        Command::Verify { tolerance, suite } => commands::verify(common, *tolerance, suite.clone()),
        Command::Wigner {
            boost1,
            axis1,
            boost2,
            axis2,
            n,
        } => commands::wigner(common, *boost1, axis1.clone(), *boost2, axis2.clone(), n.clone()),
        Command::Interference => commands::interference(common),
        Command::Evolve { mode } => commands::evolve(common, *mode),
        Command::Constants => commands::constants(common),
    }
}

/// `scan.csv` -> `scan.summary.json`.
pub fn summary_path(out: &Path) -> PathBuf {
    out.with_extension("summary.json")
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Runs the command, routes its output and returns the process exit code.
/// With `--out`, a side summary goes next to the output file; otherwise to stderr.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let result = execute(cli).and_then(|outcome| {
        match &cli.common.out {
            Some(path) => {
                write_file(path, &outcome.primary)?;
                if let Some(summary) = &outcome.summary {
                    write_file(&summary_path(path), summary)?;
                }
            }
            None => {
                // a closed pipe (`shp ... | head`) is not an error
                if let Err(e) = stdout.write_all(outcome.primary.as_bytes()).and_then(|()| stdout.flush()) {
                    return if e.kind() == std::io::ErrorKind::BrokenPipe { Ok(outcome.exit_code) } else { Err(e.into()) };
                }
                if let Some(summary) = &outcome.summary {
                    stderr.write_all(summary.as_bytes())?;
                }
            }
        }
        for note in &outcome.notes {
            writeln!(stderr, "{note}")?;
        }
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
