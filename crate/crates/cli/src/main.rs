use std::process::ExitCode;

use clap::Parser;
use shrinker_cli::{run, Cli};

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("shrinker: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
