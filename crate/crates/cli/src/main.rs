mod args;
mod commands;
mod error;

use args::{Cli, Command};
use clap::Parser;
use error::CliError;
use std::process::ExitCode;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail(CliError::config(e.to_string().trim().to_string())),
    };
    let result = match &cli.command {
        Command::Generate(a) => commands::cmd_generate(a),
        Command::Solve(a) => commands::cmd_solve(a),
        Command::Validate(a) => commands::cmd_validate(a),
        Command::Evaluate(a) => commands::cmd_evaluate(a),
        Command::Bench(a) => commands::cmd_bench(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}

fn fail(e: CliError) -> ExitCode {
    eprintln!("{}", e.to_json());
    ExitCode::from(e.exit_code as u8)
}
