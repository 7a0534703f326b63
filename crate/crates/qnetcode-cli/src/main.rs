//! `qnetcode` — deterministic simulator for teleportation-based K-pair
//! network coding and two-qubit correlation analysis.
//!
//! Exit codes: 0 success, 1 input error, 2 physicality refusal.

mod commands;
mod manifest;
mod output;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

#[derive(Debug, Parser)]
#[command(
    name = "qnetcode",
    version,
    about = "Teleportation-based network coding and quantum correlation toolkit",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a K-pair protocol and write the result file.
    Run(commands::RunArgs),
    /// Sweep the teleportation fidelity surface into a CSV file.
    Sweep(commands::SweepArgs),
    /// Report correlation measures of a Bell-diagonal two-qubit state.
    Discord(commands::DiscordArgs),
    /// Report physicality and separability of a Bell-diagonal state.
    Validate(commands::ValidateArgs),
    /// Run the two-pair crossed-demand network over per-pair channels.
    ButterflyDiscord(commands::ButterflyArgs),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // Help and version requests arrive here too; they are not
            // errors and print to standard output.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Run(args) => commands::cmd_run(args),
        Command::Sweep(args) => commands::cmd_sweep(args),
        Command::Discord(args) => commands::cmd_discord(args),
        Command::Validate(args) => commands::cmd_validate(args),
        Command::ButterflyDiscord(args) => commands::cmd_butterfly(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code())
        }
    }
}
