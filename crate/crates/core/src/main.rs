use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let (outcome, quiet) = tppforge::cli::run_from(std::env::args_os());
    let stdout = outcome.stdout(quiet);
    let _ = std::io::stdout().lock().write_all(stdout.as_bytes());
    if let Some(err) = &outcome.error {
        eprintln!("{}", err.trim_end());
    }
    ExitCode::from(outcome.exit_code as u8)
}
