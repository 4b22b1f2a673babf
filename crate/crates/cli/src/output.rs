//! CSV tabulations and JSON reports.

use std::fs::File;
use std::io::{self, Write};

use serde_json::{json, Value};

use crate::config::RunConfig;
use crate::error::CliResult;

/// Shortest round-trip decimal, switching to exponent form outside `[1e-5, 1e16)`.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || !x.is_finite() || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Writes the table to `--out` (summary JSON to stdout) or to stdout (summary to stderr).
pub fn emit_csv(cfg: &RunConfig, header: &[String], rows: &[Vec<String>], summary: Value) -> CliResult<()> {
    let summary = with_config(cfg, summary);
    match &cfg.output.out {
        Some(path) => {
            write_csv(File::create(path)?, header, rows)?;
            print_json(io::stdout().lock(), &summary)?;
        }
        None => {
            write_csv(io::stdout().lock(), header, rows)?;
            print_json(io::stderr().lock(), &summary)?;
        }
    }
    Ok(())
}

/// Writes the report, with the resolved config attached, to `--out` or stdout.
pub fn emit_json(cfg: &RunConfig, report: Value) -> CliResult<()> {
    let report = with_config(cfg, report);
    match &cfg.output.out {
        Some(path) => print_json(File::create(path)?, &report),
        None => print_json(io::stdout().lock(), &report),
    }
}

fn with_config(cfg: &RunConfig, body: Value) -> Value {
    json!({ "config": cfg.to_json(), "result": body })
}

fn write_csv<W: Write>(w: W, header: &[String], rows: &[Vec<String>]) -> CliResult<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r)?;
    }
    out.flush()?;
    Ok(())
}

fn print_json<W: Write>(mut w: W, v: &Value) -> CliResult<()> {
    serde_json::to_writer_pretty(&mut w, v).map_err(io::Error::from)?;
    writeln!(w)?;
    Ok(())
}
