use std::process::ExitCode;

use clap::Parser;
use colstd_cli::opts::Cli;

fn main() -> ExitCode {
    match colstd_cli::run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
