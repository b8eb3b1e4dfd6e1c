mod args;
mod data;
mod error;
mod kernel;
mod sample;
mod spectra;
mod stats;
mod table;
mod verify;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use error::{CliResult, EXIT_USAGE};

fn dispatch(command: &Command, out: &mut impl Write) -> CliResult<i32> {
    match command {
        Command::Verify(a) => verify::run(a, out),
        Command::Kernel(a) => kernel::run_kernel(a, out),
        Command::Sample(a) => sample::run(a, out),
        Command::Test(a) => stats::run_test(a, out),
        Command::Limit(a) => kernel::run_limit(a, out),
        Command::Replay(a) => stats::run_replay(a, out),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE as u8),
            };
        }
    };
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let code = match dispatch(&cli.command, &mut out) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    };
    let _ = out.flush();
    ExitCode::from(code as u8)
}
