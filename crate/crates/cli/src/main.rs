use std::process::ExitCode;

use clap::Parser;
use twinbarrier_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            eprintln!("twinbarrier: one or more checks failed");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("twinbarrier: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
