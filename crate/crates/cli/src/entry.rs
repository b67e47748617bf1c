use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::error::{CliError, Result};
use crate::inputs::{Args, Verb};
use crate::{run, sweep, Command};

#[derive(Debug, Parser)]
#[command(name = "funcineq", version, about = "Numerical workbench for functional inequalities")]
struct Cli {
    #[command(subcommand)]
    sub: Sub,
}

#[derive(Debug, Clone, clap::Args)]
struct Common {
    #[command(flatten)]
    args: Args,
    /// Write the JSON report here (side CSVs go next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
    /// `key = value` file mirroring the flags; flags on the command line win.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Do not print the report on stdout.
    #[arg(long)]
    quiet: bool,
}

#[derive(Debug, Subcommand)]
enum Sub {
    /// Positivity of y'' + y'/r + P y = 0 on (0, R).
    CertifyHi(Common),
    /// Positivity of the Bessel-pair ODE for (V, W).
    CertifyPair(Common),
    /// Best constant β(P, R) by oscillation bisection.
    Beta(Common),
    /// Discrete Rayleigh quotients and Hardy–Sobolev values.
    Rayleigh(Common),
    /// Inequality checks on test functions or on the built-in family.
    Verify(Common),
    /// Transport inequalities on 1-D densities and Sobolev duality.
    TransportCheck(Common),
    /// Moser–Onofri functionals and thresholds.
    Moser(Common),
    /// Re-check a stored report: round trip and fresh recomputation.
    Report(Common),
    /// Run a command template over a parameter grid.
    Sweep(SweepCli),
}

#[derive(Debug, clap::Args)]
struct SweepCli {
    /// Command line of one point, e.g. "beta --potential 1 --n 3".
    #[arg(long)]
    template: String,
    /// Axes `name=v1,v2;name2=w1,w2`; empty means no points.
    #[arg(long, default_value = "")]
    grid: String,
    #[arg(long)]
    jobs: Option<usize>,
    /// Summary CSV path (stdout when absent).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Directory receiving one report per point.
    #[arg(long)]
    reports_dir: Option<PathBuf>,
    #[arg(long)]
    cache_dir: Option<PathBuf>,
}

fn command(verb: Verb, c: Common) -> Result<(Command, bool)> {
    let args = match &c.config {
        Some(path) => c.args.overriding(&Args::from_config(path)?)?,
        None => c.args,
    };
    Ok((Command { verb, args, out: c.out, cache_dir: c.cache_dir }, c.quiet))
}

fn split(sub: Sub) -> Result<(Command, bool)> {
    match sub {
        Sub::CertifyHi(c) => command(Verb::CertifyHi, c),
        Sub::CertifyPair(c) => command(Verb::CertifyPair, c),
        Sub::Beta(c) => command(Verb::Beta, c),
        Sub::Rayleigh(c) => command(Verb::Rayleigh, c),
        Sub::Verify(c) => command(Verb::Verify, c),
        Sub::TransportCheck(c) => command(Verb::TransportCheck, c),
        Sub::Moser(c) => command(Verb::Moser, c),
        Sub::Report(c) => command(Verb::Report, c),
        Sub::Sweep(_) => Err(CliError::input("sweep templates cannot nest")),
    }
}

/// Parses one command line (without the program name) into a [`Command`].
pub fn parse_command_line(line: &str) -> Result<Command> {
    let words = shlex::split(line).ok_or_else(|| CliError::input(format!("cannot tokenize `{line}`")))?;
    let cli = Cli::try_parse_from(std::iter::once("funcineq".to_string()).chain(words))
        .map_err(|e| CliError::input(e.to_string()))?;
    Ok(split(cli.sub)?.0)
}

fn execute(sub: Sub) -> Result<i32> {
    if let Sub::Sweep(s) = sub {
        let mut template = parse_command_line(&s.template)?;
        template.cache_dir = s.cache_dir.or(template.cache_dir);
        template.out = None;
        if let Some(d) = &s.reports_dir {
            std::fs::create_dir_all(d).map_err(|e| CliError::io(d, e))?;
        }
        let summary = sweep(&template, &s.grid, s.jobs, s.reports_dir)?;
        let csv = summary.to_csv();
        match &s.out {
            Some(p) => std::fs::write(p, csv).map_err(|e| CliError::io(p, e))?,
            None => print!("{csv}"),
        }
        return Ok(0);
    }
    let (cmd, quiet) = split(sub)?;
    let report = run(&cmd)?;
    if !quiet {
        let mut out = std::io::stdout().lock();
        let _ = out.write_all(report.to_json().as_bytes());
    }
    Ok(report.exit_code())
}

/// Process entry point; returns the exit code.
pub fn main_with<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.sub) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
