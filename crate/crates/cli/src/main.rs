use std::process::ExitCode;

use clap::Parser;
use sobspec_cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = RunConfig::resolve(cli.command, cli.params).and_then(|cfg| run::run(&cfg));
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sobspec: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
