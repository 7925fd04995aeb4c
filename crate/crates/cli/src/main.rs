use std::io;
use std::process::ExitCode;

use clap::Parser;
use su11net_cli::app::{run, Cli};

fn main() -> ExitCode {
    let cli = Cli::parse();
    ExitCode::from(run(cli, &mut io::stdout().lock(), &mut io::stderr().lock()))
}
