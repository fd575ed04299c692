//! `detpar`: runs, explores, and type checks programs of the parallel
//! λ-calculus. Every program is linked against the corpus library before use.

mod args;
mod commands;
mod render;

use std::process::ExitCode;

use clap::Parser;

fn main() -> ExitCode {
    // Exit status 2 means Inconclusive, so usage errors use 3 instead of
    // clap's default.
    let cli = match args::Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { commands::INTERNAL_ERROR } else { 0 });
        }
    };
    let style = render::Style::from_env();
    match commands::dispatch(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("{}", style.error(&err.to_string()));
            ExitCode::from(commands::INTERNAL_ERROR)
        }
    }
}
