use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(lommel_cli::run(std::env::args_os()))
}
