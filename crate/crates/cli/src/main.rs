mod args;
mod commands;
mod inputs;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Build(a) => commands::build(a),
        Command::Classify(a) => commands::classify(a),
        Command::Verify(a) => commands::verify(a),
        Command::Lyapunov(a) => commands::lyapunov(a),
        Command::Recheck(a) => commands::recheck(a),
        Command::Battery(a) => commands::run_battery(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
