use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};
use crate::report::Report;
use crate::{run, Command};

pub const MAX_SWEEP_POINTS: usize = 100_000;

/// One grid point of a sweep. Failures are recorded, not propagated.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub index: usize,
    pub params: Vec<(String, String)>,
    pub exit_code: i32,
    pub status: String,
    pub headline: Option<f64>,
    pub message: String,
    #[serde(skip)]
    pub report: Option<Report>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSummary {
    pub names: Vec<String>,
    pub rows: Vec<SweepRow>,
}

impl SweepSummary {
    /// One row per point; `.` decimals, no locale, RFC 4180 quoting.
    pub fn to_csv(&self) -> String {
        let mut header: Vec<String> = vec!["index".into()];
        header.extend(self.names.iter().cloned());
        header.extend(["exit_code", "status", "headline", "message"].map(String::from));
        let mut out = header.join(",");
        out.push('\n');
        for r in &self.rows {
            let mut cells = vec![r.index.to_string()];
            cells.extend(r.params.iter().map(|(_, v)| quote(v)));
            cells.push(r.exit_code.to_string());
            cells.push(quote(&r.status));
            cells.push(r.headline.map(|h| format!("{h:e}")).unwrap_or_default());
            cells.push(quote(&r.message));
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    pub fn headlines(&self) -> Vec<Option<f64>> {
        self.rows.iter().map(|r| r.headline).collect()
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Parses `name=v1,v2;name2=w1,w2` into axes. An empty string is an empty grid.
pub fn parse_grid(spec: &str) -> Result<Vec<(String, Vec<String>)>> {
    let mut axes = Vec::new();
    for part in spec.split(';').map(str::trim).filter(|p| !p.is_empty()) {
        let (name, values) = part
            .split_once('=')
            .ok_or_else(|| CliError::input(format!("grid axis `{part}` must look like name=v1,v2")))?;
        let values: Vec<String> = values.split(',').map(|v| v.trim().to_string()).filter(|v| !v.is_empty()).collect();
        axes.push((name.trim().to_string(), values));
    }
    Ok(axes)
}

fn points(axes: &[(String, Vec<String>)]) -> Result<Vec<Vec<(String, String)>>> {
    if axes.is_empty() {
        return Ok(Vec::new());
    }
    let total = axes.iter().try_fold(1usize, |acc, (_, v)| acc.checked_mul(v.len()));
    match total {
        Some(t) if t <= MAX_SWEEP_POINTS => {}
        _ => return Err(CliError::input(format!("sweep grids are limited to {MAX_SWEEP_POINTS} points"))),
    }
    let mut out: Vec<Vec<(String, String)>> = vec![Vec::new()];
    for (name, values) in axes {
        out = out
            .into_iter()
            .flat_map(|p| {
                values.iter().map(move |v| {
                    let mut q = p.clone();
                    q.push((name.clone(), v.clone()));
                    q
                })
            })
            .collect();
    }
    Ok(out)
}

/// Runs `template` at every grid point in parallel. `jobs = None` uses all
/// cores. Each point shares the template's cache directory.
pub fn sweep(template: &Command, grid: &str, jobs: Option<usize>, reports_dir: Option<PathBuf>) -> Result<SweepSummary> {
    let axes = parse_grid(grid)?;
    let names: Vec<String> = axes.iter().map(|(n, _)| n.clone()).collect();
    let pts = points(&axes)?;
    // Validate parameter names once, before any work.
    if let Some(p) = pts.first() {
        let mut args = template.args.clone();
        for (k, v) in p {
            args.set(k, v)?;
        }
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Pool(e.to_string()))?;
    let rows = pool.install(|| {
        pts.into_par_iter()
            .enumerate()
            .map(|(index, params)| {
                let attempt = (|| {
                    let mut cmd = template.clone();
                    for (k, v) in &params {
                        cmd.args.set(k, v)?;
                    }
                    cmd.out = reports_dir.as_ref().map(|d| d.join(format!("point-{index:06}.json")));
                    run(&cmd)
                })();
                match attempt {
                    Ok(r) => SweepRow {
                        index,
                        params,
                        exit_code: r.exit_code(),
                        status: r.certificate.status.clone(),
                        headline: r.certificate.headline,
                        message: r.certificate.notes.first().cloned().unwrap_or_default(),
                        report: Some(r),
                    },
                    Err(e) => SweepRow {
                        index,
                        params,
                        exit_code: e.exit_code(),
                        status: "error".into(),
                        headline: None,
                        message: e.to_string(),
                        report: None,
                    },
                }
            })
            .collect()
    });
    Ok(SweepSummary { names, rows })
}
