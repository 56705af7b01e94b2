use std::process::ExitCode;

use clap::Parser;
use weighted_entropy::cli::{emit, execute, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let report = execute(&cli);
    match emit(&cli, &report) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("wentropy: cannot write report: {e}");
            ExitCode::from(2)
        }
    }
}
