use std::io;
use std::process::ExitCode;

use hanabi_tom::cli;

fn main() -> ExitCode {
    cli::init_logging();
    let code = cli::run(std::env::args_os(), &mut io::stdout().lock());
    ExitCode::from(code as u8)
}
