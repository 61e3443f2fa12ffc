use std::process::ExitCode;

use clap::Parser;
use nearby_cli::{run, Cli, RunConfig};

fn main() -> ExitCode {
    let cfg = RunConfig::from(Cli::parse());
    match run(&cfg) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("nearby: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
