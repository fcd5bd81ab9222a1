use std::process::ExitCode;

use clap::Parser;
use hybrid_nlm_cli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("hnlm: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
