use std::process::ExitCode;

use clap::Parser;
use quatl1_cli::{commands, Cli, RunConfig};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, flags) = cli.command.split();
    let result = commands::configure_threads()
        .and_then(|()| RunConfig::resolve(command, flags))
        .and_then(|cfg| commands::run(&cfg, &mut std::io::stdout().lock()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
