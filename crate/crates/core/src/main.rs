use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = bohr_core::cli::run(std::env::args_os());
    // a closed pipe is not an error worth reporting
    let _ = writeln!(std::io::stdout(), "{}", outcome.stdout);
    ExitCode::from(outcome.code as u8)
}
