//! Command-line front end: input normalization, dispatch to the numerical
//! modules, JSON reports, a content-addressed result cache and parallel
//! parameter sweeps.

mod cache;
mod compute;
mod entry;
mod error;
mod inputs;
mod report;
mod sweep;

pub use cache::Cache;
pub use entry::{main_with, parse_command_line};
pub use error::{CliError, Result};
pub use inputs::{Args, Inputs, Verb};
pub use report::{Certificate, Report, ARTIFACT_VERSION, SCHEMA_VERSION};
pub use sweep::{parse_grid, sweep, SweepRow, SweepSummary, MAX_SWEEP_POINTS};

use std::path::PathBuf;
use std::time::Instant;

/// One invocation: a verb, its raw flags and where results go.
#[derive(Debug, Clone, Default)]
pub struct Command {
    pub verb: Verb,
    pub args: Args,
    pub out: Option<PathBuf>,
    pub cache_dir: Option<PathBuf>,
}

impl Command {
    pub fn new(verb: Verb, args: Args) -> Self {
        Command { verb, args, out: None, cache_dir: None }
    }
}

/// Normalizes the inputs, consults the cache, computes, writes the report
/// to `command.out` and returns it.
pub fn run(command: &Command) -> Result<Report> {
    let inputs = Inputs::normalize(command.verb, &command.args)?;
    let echo = command.args.echo(command.verb)?;
    let cache = match (&command.cache_dir, command.verb.cacheable()) {
        (Some(dir), true) => Some(Cache::open(dir)?),
        _ => None,
    };
    let report = match &cache {
        Some(c) => c.get_or_compute(&inputs, || fresh(command.verb, &inputs, echo.clone()))?,
        None => fresh(command.verb, &inputs, echo.clone())?,
    };
    let report = Report { command: echo, ..report };
    if let Some(path) = &command.out {
        report.write(path)?;
        compute::write_artifacts(command.verb, &inputs, &report, path)?;
    }
    Ok(report)
}

/// Computes a report without touching any cache.
pub fn fresh(verb: Verb, inputs: &Inputs, echo: serde_json::Value) -> Result<Report> {
    let start = Instant::now();
    let outcome = compute::dispatch(verb, inputs)?;
    Ok(Report::assemble(echo, inputs, outcome, start.elapsed()))
}
