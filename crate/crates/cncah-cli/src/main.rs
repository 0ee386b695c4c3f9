use std::process::ExitCode;

fn main() -> ExitCode {
    cncah_cli::cli_main(std::env::args_os())
}
