use std::io::Write;
use std::process::ExitCode;

use clap::Parser;
use tgcli::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    let color = std::env::var("TG_COLOR").is_ok_and(|v| v == "1");
    let outcome = run(&cli, color);
    print!("{}", outcome.stdout);
    std::io::stdout().flush().ok();
    eprint!("{}", outcome.stderr);
    ExitCode::from(outcome.code)
}
