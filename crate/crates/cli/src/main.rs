use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let d = apportion_cli::dispatch(std::env::args_os());
    let _ = std::io::stdout().write_all(d.stdout.as_bytes());
    let _ = std::io::stderr().write_all(d.stderr.as_bytes());
    ExitCode::from(d.code)
}
