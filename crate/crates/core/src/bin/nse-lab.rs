use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use nse_lab::lab::{exit_code, run, Command, RunRequest};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Cmd {
    Constants,
    Simulate,
    Ray,
    VerifyStrip,
    Steady,
    SigmaFit,
}

impl From<Cmd> for Command {
    fn from(c: Cmd) -> Self {
        match c {
            Cmd::Constants => Command::Constants,
            Cmd::Simulate => Command::Simulate,
            Cmd::Ray => Command::Ray,
            Cmd::VerifyStrip => Command::VerifyStrip,
            Cmd::Steady => Command::Steady,
            Cmd::SigmaFit => Command::SigmaFit,
        }
    }
}

/// Spectral Navier-Stokes laboratory: bound ledgers, real and complex-time
/// integration, strip verification and C(sigma) class fits.
#[derive(Debug, Parser)]
#[command(name = "nse-lab", version)]
struct Cli {
    command: Cmd,
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// `dotted.key=value`, applied after the file; repeatable.
    #[arg(long = "override", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let req = RunRequest {
        command: cli.command.into(),
        config: Some(cli.config),
        out: cli.out,
        seed: cli.seed,
        overrides: cli.overrides,
    };
    match run(&req) {
        Ok(outcome) => {
            println!("{}", outcome.summary);
            ExitCode::from(outcome.status.code() as u8)
        }
        Err(e) => {
            eprintln!("nse-lab: {e}");
            ExitCode::from(exit_code(&e) as u8)
        }
    }
}
