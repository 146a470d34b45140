//! Batch workloads and their CSV report.
//!
//! A workload is a TSV file, one query per line:
//! `id<TAB>mode<TAB>endpoint<TAB>pattern`, where mode is `ssr` or `sdr`
//! and endpoint is an external vertex id. Lines starting with `#` are skipped.
//!
//! Timings cover evaluation only; graph loading and pattern compilation
//! happen before the clock starts.

use std::collections::HashSet;
use std::io::Write;
use std::time::Duration;

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{EngineOptions, EvalError, Mode, Query};
use crate::graph_store::LabeledGraph;

pub const CSV_HEADER: [&str; 7] = [
    "id",
    "mode",
    "algorithm",
    "result_count",
    "iterations",
    "time_ms",
    "status",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("workload line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("workload line {line}: duplicate id '{id}'")]
    DuplicateId { line: usize, id: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkloadEntry {
    pub id: String,
    pub mode: Mode,
    pub endpoint: String,
    pub pattern: String,
}

pub fn parse_workload(text: &str) -> Result<Vec<WorkloadEntry>, WorkloadError> {
    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.strip_suffix('\r').unwrap_or(line);
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.splitn(4, '\t').collect();
        if fields.len() != 4 || fields[..3].iter().any(|f| f.is_empty()) {
            return Err(WorkloadError::Malformed {
                line: i + 1,
                message: "expected id, mode, endpoint and pattern separated by tabs".into(),
            });
        }
        let mode = fields[1]
            .parse::<Mode>()
            .map_err(|message| WorkloadError::Malformed { line: i + 1, message })?;
        if !seen.insert(fields[0]) {
            return Err(WorkloadError::DuplicateId {
                line: i + 1,
                id: fields[0].to_owned(),
            });
        }
        entries.push(WorkloadEntry {
            id: fields[0].to_owned(),
            mode,
            endpoint: fields[2].to_owned(),
            pattern: fields[3].to_owned(),
        });
    }
    Ok(entries)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Timeout,
    Error,
}

impl Status {
    pub fn as_str(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Timeout => "timeout",
            Status::Error => "error",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub id: String,
    pub mode: Mode,
    pub algorithm: String,
    pub result_count: usize,
    pub iterations: usize,
    pub time_ms: f64,
    pub status: Status,
    /// Set for `Status::Error`; not part of the CSV.
    pub message: Option<String>,
}

#[derive(Debug, Clone)]
pub struct BenchConfig {
    pub opts: EngineOptions,
    /// Runs per entry. With two or more, the first run is a warm-up and is
    /// not counted.
    pub repeat: usize,
    /// Evaluate entries concurrently over the shared graph.
    pub parallel: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            opts: EngineOptions::default(),
            repeat: 1,
            parallel: false,
        }
    }
}

fn median_ms(mut samples: Vec<Duration>) -> f64 {
    samples.sort();
    let ms = |d: Duration| d.as_secs_f64() * 1000.0;
    let n = samples.len();
    if n == 0 {
        0.0
    } else if n % 2 == 1 {
        ms(samples[n / 2])
    } else {
        (ms(samples[n / 2 - 1]) + ms(samples[n / 2])) / 2.0
    }
}

/// Median of the runs after the warm-up one (the only run when there is just one).
fn reported_ms(mut samples: Vec<Duration>) -> f64 {
    if samples.len() >= 2 {
        samples.remove(0);
    }
    median_ms(samples)
}

pub fn run_entry(g: &LabeledGraph, entry: &WorkloadEntry, cfg: &BenchConfig) -> BenchRow {
    let mut row = BenchRow {
        id: entry.id.clone(),
        mode: entry.mode,
        algorithm: cfg.opts.algorithm.to_string(),
        result_count: 0,
        iterations: 0,
        time_ms: 0.0,
        status: Status::Error,
        message: None,
    };
    let vertex = match g.vertex_index(&entry.endpoint) {
        Ok(v) => v,
        Err(e) => {
            row.message = Some(e.to_string());
            return row;
        }
    };
    let query = match Query::parse(&entry.pattern, g) {
        Ok(q) => q,
        Err(e) => {
            row.message = Some(e.to_string());
            return row;
        }
    };
    let runs = cfg.repeat.max(1);
    let mut samples = Vec::with_capacity(runs);
    for _ in 0..runs {
        match query.evaluate(g, entry.mode, vertex, &cfg.opts) {
            Ok(r) => {
                row.result_count = r.reachable.len();
                row.iterations = r.iterations;
                samples.push(r.elapsed);
            }
            Err(EvalError::Timeout { iterations, .. }) => {
                row.status = Status::Timeout;
                row.iterations = iterations;
                row.time_ms = cfg.opts.timeout.map_or(0.0, |t| t.as_secs_f64() * 1000.0);
                return row;
            }
            Err(e) => {
                row.message = Some(e.to_string());
                return row;
            }
        }
    }
    row.time_ms = reported_ms(samples);
    row.status = Status::Ok;
    row
}

/// Runs every entry; rows come back in workload order either way.
pub fn run_workload(g: &LabeledGraph, entries: &[WorkloadEntry], cfg: &BenchConfig) -> Vec<BenchRow> {
    if cfg.parallel {
        entries.par_iter().map(|e| run_entry(g, e, cfg)).collect()
    } else {
        entries.iter().map(|e| run_entry(g, e, cfg)).collect()
    }
}

pub fn write_csv<W: Write>(rows: &[BenchRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.id.as_str(),
            r.mode.as_str(),
            r.algorithm.as_str(),
            &r.result_count.to_string(),
            &r.iterations.to_string(),
            &format!("{:.3}", r.time_ms),
            r.status.as_str(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
