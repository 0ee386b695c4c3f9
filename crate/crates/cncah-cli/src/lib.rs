//! `cncah` command-line tool: generate network instances inside shape masks,
//! lay them out, detect and score boundary nodes, render SVG snapshots and
//! run benchmark sweeps.

mod commands;
pub mod render;

pub use render::{render_svg, RenderOptions};

use std::ffi::OsString;
use std::process::ExitCode;

use clap::Parser;

use commands::{Cli, CliError};

/// Parses `argv` and runs the selected subcommand. Exit code 0 on success,
/// 1 on input errors (unreadable or invalid files, infeasible parameters),
/// 2 on usage errors.
pub fn cli_main<I, T>(argv: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(u8::try_from(e.exit_code()).unwrap_or(2));
        }
    };
    match commands::run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
        Err(CliError::Input(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
