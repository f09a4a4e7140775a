mod args;
mod commands;
mod failure;
mod manifest;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command, ScenarioCommand};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(failure::CONFIG as u8);
        }
    };
    let outcome = match &cli.command {
        Command::Plan(a) => commands::plan(a),
        Command::Compare(a) => commands::compare(a),
        Command::Validate(a) => commands::validate_cmd(a),
        Command::Scenario(ScenarioCommand::Dump(a)) => commands::dump(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("stagplan: {f}");
            ExitCode::from(f.code as u8)
        }
    }
}
