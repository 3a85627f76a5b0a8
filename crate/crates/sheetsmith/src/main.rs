use std::process::ExitCode;

use clap::Parser;
use sheetsmith::cli::{execute, Cli, Io};
use tracing_subscriber::EnvFilter;

fn main() -> ExitCode {
    tracing_subscriber::fmt()
        .with_env_filter(
            EnvFilter::try_from_env("SHEETSMITH_LOG").unwrap_or_else(|_| EnvFilter::new("warn")),
        )
        .with_writer(std::io::stderr)
        .init();
    let cli = Cli::parse();
    let (mut out, mut err) = (std::io::stdout(), std::io::stderr());
    ExitCode::from(execute(
        cli,
        &mut Io {
            out: &mut out,
            err: &mut err,
        },
    ))
}
