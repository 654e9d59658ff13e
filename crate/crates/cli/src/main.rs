//! `omega`: command-line frontend for ideal statistics, the Gaussian lattice
//! sieve and ergodic averages.

mod commands;
mod config;
mod output;

use std::fs;
use std::io::{self, Write};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser};
use serde_json::json;

use commands::Command;
use config::RunConfig;

pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_OVERFLOW: u8 = 3;
pub const EXIT_ACCEPTANCE: u8 = 4;

#[derive(Debug, Parser)]
#[command(name = "omega", version, about = "Prime-factor statistics of ideals and ergodic averages")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    config: RunConfig,
}

fn fail(kind: &str, message: String, code: u8) -> ExitCode {
    let body = json!({ "error": kind, "message": message });
    eprintln!("{body}");
    ExitCode::from(code)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            let _ = Cli::command().print_help();
            return ExitCode::from(EXIT_VALIDATION);
        }
        Err(e) => return fail("validation", e.kind().to_string() + ": " + e.to_string().trim(), EXIT_VALIDATION),
    };

    let outcome = match commands::run(cli.command, &cli.config) {
        Ok(o) => o,
        Err(e) if e.is_overflow() => return fail("overflow", e.to_string(), EXIT_OVERFLOW),
        Err(e) => return fail("validation", e.to_string(), EXIT_VALIDATION),
    };

    let format = outcome.output.resolve(cli.config.format);
    let written = match &cli.config.out_dir {
        Some(dir) => {
            let ext = format.map(|f| f.extension()).unwrap_or("txt");
            let path = dir.join(format!("{}.{ext}", cli.command.name()));
            fs::create_dir_all(dir).and_then(|_| fs::File::create(&path)).and_then(|file| {
                let mut out = io::BufWriter::new(file);
                outcome.output.write(cli.config.format, &mut out).and_then(|_| out.flush())
            })
        }
        None => {
            let mut out = io::BufWriter::new(io::stdout().lock());
            outcome.output.write(cli.config.format, &mut out).and_then(|_| out.flush())
        }
    };
    if let Err(e) = written {
        if !output::is_broken_pipe(&e) {
            return fail("io", e.to_string(), 1);
        }
    }
    if outcome.acceptance_failed {
        ExitCode::from(EXIT_ACCEPTANCE)
    } else {
        ExitCode::SUCCESS
    }
}
