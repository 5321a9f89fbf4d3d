use std::process::ExitCode;

use clap::Parser;
use rail_cli::{execute, Cli};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("RAIL_LOG", "off")).init();
    let cli = Cli::parse();
    match execute(&cli, &mut std::io::stdout().lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("rail: {failure}");
            ExitCode::from(failure.code)
        }
    }
}
