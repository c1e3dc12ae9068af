use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(dirac_nu::cli::main_with_args(std::env::args_os()))
}
