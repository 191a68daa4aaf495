use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    invobs_cli::main_with(&invobs_cli::Cli::parse())
}
