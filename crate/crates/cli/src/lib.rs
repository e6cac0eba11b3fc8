//! Command-line front end: design, sweep and verify, with CSV, JSON and Touchstone
//! output.

pub mod args;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;
pub mod touchstone;
pub mod verify;

use clap::{CommandFactory, Parser};

use args::{Cli, Command};
use error::CliError;

/// Flags as run, with the config file already spliced in.
fn recorded(argv: &[String]) -> Vec<String> {
    let mut out = Vec::new();
    let mut it = argv.iter().skip(1);
    while let Some(a) = it.next() {
        if a == "--config" {
            it.next();
        } else if !a.starts_with("--config=") {
            out.push(a.clone());
        }
    }
    out
}

/// Runs one invocation; `argv[0]` is the program name.
pub fn run(argv: Vec<String>) -> Result<(), CliError> {
    let argv = config::expand(argv, &Cli::command())?;
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) if !e.use_stderr() => {
            print!("{}", e.render());
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.render().to_string().trim_end().to_string())),
    };
    let args = recorded(&argv);
    match &cli.command {
        Command::Design(a) => commands::design(a, &args),
        Command::Sparams(a) => commands::sparams(a, &args),
        Command::Sweep(a) => commands::sweep(a, &args),
        Command::Spectrum(a) => commands::spectrum(a, &args),
        Command::Verify(a) => verify::verify(a, &args),
    }
}
