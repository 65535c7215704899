use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(satake::cli::main_entry(std::env::args_os()))
}
