//! `crashpbo`: benchmarks, the session service, export replay and a
//! terminal demo.

mod bench;
mod demo;
mod replay;
mod serve;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "crashpbo", version, about = "Preference optimization with crash feedback")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a synthetic benchmark suite and print the aggregate table.
    Bench(bench::BenchArgs),
    /// Host the HTTP session service until SIGTERM or ctrl-c.
    Serve(serve::ServeArgs),
    /// Re-fold an exported session and compare dataset hashes.
    Replay(replay::ReplayArgs),
    /// Run a 1-D session against a synthetic decision maker.
    Demo(demo::DemoArgs),
}

#[derive(Debug)]
pub enum CliError {
    /// Bad flags, unreadable inputs or invalid configs (exit 2).
    Usage(String),
    /// Anything that fails after the inputs were accepted (exit 1).
    Runtime(String),
}

impl CliError {
    pub fn runtime(e: impl std::fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    tracing_subscriber::fmt()
        .with_writer(std::io::stderr)
        .with_env_filter(
            tracing_subscriber::EnvFilter::try_from_default_env()
                .unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("warn")),
        )
        .init();
    let result = match cli.command {
        Command::Bench(args) => bench::run(args),
        Command::Serve(args) => serve::run(args),
        Command::Replay(args) => replay::run(args),
        Command::Demo(args) => demo::run(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
