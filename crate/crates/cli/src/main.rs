//! `polarfec` command-line front end.
//!
//! Exit codes: 0 success, 1 configuration error, 2 runtime failure.

mod analyze;
mod construct;
mod decode;
mod sweep;

use std::io::Write;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

/// Failure classes mapped to exit codes.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Runtime(String),
}

impl CliError {
    pub fn config(e: impl std::fmt::Display) -> Self {
        CliError::Config(e.to_string())
    }

    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Writes one line to stdout; a closed pipe ends output quietly.
pub fn print_line(text: &str) -> CliResult<()> {
    let mut out = std::io::stdout().lock();
    match writeln!(out, "{text}").and_then(|()| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::runtime(e)),
        _ => Ok(()),
    }
}

pub fn print_json(value: &serde_json::Value) -> CliResult<()> {
    print_line(&serde_json::to_string_pretty(value).map_err(CliError::runtime)?)
}

#[derive(Parser, Debug)]
#[command(
    name = "polarfec",
    version,
    about = "Polar and polar-LDPC codes: construction, analysis and simulation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a polar code spec, an LDPC alist or a concatenated spec.
    #[command(subcommand)]
    Construct(construct::Construct),
    /// Structural report on `T_n` and optionally on one code.
    Analyze(analyze::Analyze),
    /// Encode, transmit and decode a single frame.
    Decode(decode::Decode),
    /// Monte Carlo BER/BLER sweep.
    Sweep(sweep::Sweep),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Construct(c) => construct::run(c),
        Command::Analyze(a) => analyze::run(a),
        Command::Decode(d) => decode::run(d),
        Command::Sweep(s) => sweep::run(s),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
