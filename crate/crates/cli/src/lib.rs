//! Scenario runner for the markovlab laboratory: reads a `key = value`
//! scenario file, runs it, and writes a CSV table plus a summary of every
//! check with its measured value and tolerance.

pub mod config;
pub mod error;
pub mod inputs;
pub mod report;
pub mod runner;
pub mod scenario;

use std::fs;
use std::path::{Path, PathBuf};

pub use config::{parse_config, serialize, ScenarioConfig, Value};
pub use error::CliError;
pub use runner::{run, RunOutput};
pub use scenario::Scenario;

#[derive(Debug, Clone, Default)]
pub struct Options {
    pub config: PathBuf,
    pub out: PathBuf,
    pub scenario: Option<String>,
    pub strict: bool,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct Outcome {
    pub passed: bool,
    pub summary: String,
    pub csv_path: PathBuf,
    pub summary_path: PathBuf,
}

/// Applies command-line overrides to the file contents and validates.
pub fn load(text: &str, scenario: Option<&str>, seed: Option<u64>) -> Result<ScenarioConfig, CliError> {
    let mut doc = config::parse_document(text)?;
    if let Some(seed) = seed {
        doc.insert("seed".into(), Value::Number(seed as f64));
    }
    let scenario = scenario.map(Scenario::from_name).transpose()?;
    ScenarioConfig::from_document(doc, scenario)
}

fn write(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

pub fn execute(opts: &Options) -> Result<Outcome, CliError> {
    let text = fs::read_to_string(&opts.config).map_err(|e| CliError::Io {
        path: opts.config.display().to_string(),
        message: e.to_string(),
    })?;
    let cfg = load(&text, opts.scenario.as_deref(), opts.seed)?;
    let output = run(&cfg, opts.strict)?;

    fs::create_dir_all(&opts.out).map_err(|e| CliError::Io {
        path: opts.out.display().to_string(),
        message: e.to_string(),
    })?;
    let stem = cfg.text("output")?.unwrap_or(cfg.scenario.name()).to_string();
    let csv_path = opts.out.join(format!("{stem}.csv"));
    let summary_path = opts.out.join(format!("{stem}_summary.txt"));
    let summary = output.summary.render(cfg.scenario.name());
    write(&csv_path, &output.table.to_csv())?;
    write(&summary_path, &summary)?;
    Ok(Outcome {
        passed: output.summary.passed(),
        summary,
        csv_path,
        summary_path,
    })
}
