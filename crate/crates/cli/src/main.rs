use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use markovlab_cli::{execute, Options};

/// Run a markovlab scenario file and write its CSV table and summary.
///
/// Exit status: 0 when every check passes, 1 when a check fails, 2 for
/// usage, parse or I/O errors.
#[derive(Debug, Parser)]
#[command(name = "markovlab", version)]
struct Args {
    /// Scenario file in `key = value` format.
    #[arg(long)]
    config: PathBuf,
    /// Directory for the CSV and summary files.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Scenario name, overriding the one in the file.
    #[arg(long)]
    scenario: Option<String>,
    /// Treat a violated step-size guard as a failure.
    #[arg(long)]
    strict: bool,
    /// Seed for random spec generation, overriding the file.
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let opts = Options {
        config: args.config,
        out: args.out,
        scenario: args.scenario,
        strict: args.strict,
        seed: args.seed,
    };
    match execute(&opts) {
        Ok(outcome) => {
            print!("{}", outcome.summary);
            ExitCode::from(if outcome.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
