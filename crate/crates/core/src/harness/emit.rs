//! CSV and JSON-lines writers.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::experiment::{ExperimentRecord, TraceRecord};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "strategy,n_devices,replication,round,avg_utility,normalized_utility,mean_risk_probability,mean_queuing_delay,converged,shares";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Jsonl,
}

/// `printf("%.9g")`.
pub fn format_g9(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return if x.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    let sci = format!("{x:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..9).contains(&exp) {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (8 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn csv_row(r: &ExperimentRecord) -> String {
    let shares: Vec<String> = r.shares.iter().map(|x| format_g9(*x)).collect();
    format!(
        "{},{},{},{},{},{},{},{},{},{}",
        r.strategy,
        r.n_devices,
        r.replication,
        r.round,
        format_g9(r.avg_utility),
        format_g9(r.normalized_utility),
        format_g9(r.mean_risk_probability),
        format_g9(r.mean_queuing_delay),
        r.converged,
        shares.join(";"),
    )
}

fn write_lines(path: &Path, lines: impl Iterator<Item = Result<String>>) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for line in lines {
        writeln!(w, "{}", line?).map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

fn json_line<T: Serialize>(value: &T) -> Result<String> {
    serde_json::to_string(value).map_err(|e| Error::domain(format!("serialising record: {e}")))
}

pub fn emit(records: &[ExperimentRecord], path: &Path, format: OutputFormat) -> Result<()> {
    match format {
        OutputFormat::Csv => {
            write_lines(path, std::iter::once(Ok(CSV_HEADER.to_string())).chain(records.iter().map(|r| Ok(csv_row(r)))))
        }
        OutputFormat::Jsonl => write_lines(path, records.iter().map(json_line)),
    }
}

pub fn emit_trace(traces: &[TraceRecord], path: &Path) -> Result<()> {
    write_lines(path, traces.iter().map(json_line))
}
