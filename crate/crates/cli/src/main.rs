mod commands;
mod config;

use std::io::Write;
use std::process::ExitCode;

use clap::Parser;

use config::{Cli, RunConfig};

/// Exit codes: 0 success, 1 a verification FAIL, 2 usage or validation
/// error, 3 resource budget exceeded.
pub const EXIT_FAIL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_BUDGET: u8 = 3;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let command = match (cli.config, cli.command) {
        (Some(_), Some(_)) => return usage("pass either --config or a subcommand, not both"),
        (None, None) => return usage("a subcommand or --config is required (see --help)"),
        (None, Some(c)) => c,
        (Some(path), None) => {
            let text = match std::fs::read_to_string(&path) {
                Ok(t) => t,
                Err(e) => return usage(&format!("cannot read {}: {e}", path.display())),
            };
            let cfg: RunConfig = match serde_json::from_str(&text) {
                Ok(c) => c,
                Err(e) => return usage(&format!("invalid config {}: {e}", path.display())),
            };
            match cfg.into_command() {
                Ok(c) => c,
                Err(e) => return usage(&e),
            }
        }
    };
    match commands::run(command) {
        Ok(out) => {
            let mut stdout = std::io::stdout().lock();
            if stdout.write_all(out.text.as_bytes()).and_then(|_| stdout.flush()).is_err() {
                return ExitCode::from(EXIT_USAGE);
            }
            if let Some(note) = out.note {
                eprintln!("{note}");
            }
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

fn usage(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(EXIT_USAGE)
}
