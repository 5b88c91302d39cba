//! Row types and their CSV / JSON encodings.

use std::io::Write;

use anyhow::Result;
use heckenil_core::report::CongruenceReport;
use serde::{Deserialize, Serialize};

use crate::args::Format;

/// One index sweep row. CSV columns, in order: `p,ell,space,k,index,bound,slack_observed`;
/// `bound` and `slack_observed` are empty where no bound applies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexRow {
    pub p: u32,
    pub ell: u64,
    pub space: String,
    pub k: u64,
    pub index: usize,
    pub bound: Option<usize>,
    pub slack_observed: Option<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PartitionRow {
    pub n: u64,
    /// Decimal; exact counts can exceed 64 bits.
    pub value: String,
}

/// Flat view of a report for CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct ReportRow {
    family: String,
    rigor: String,
    passed: bool,
    checked: u64,
    failures: usize,
    first_failures: String,
    n_min: u64,
    n_max: u64,
    precision: Option<usize>,
    params: String,
    notes: String,
}

pub fn write_rows<T: Serialize>(rows: &[T], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(&mut *out, rows)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// CSV with a header even when there are no rows.
pub fn write_index_rows(rows: &[IndexRow], format: Format, out: &mut dyn Write) -> Result<()> {
    if format == Format::Csv && rows.is_empty() {
        writeln!(out, "p,ell,space,k,index,bound,slack_observed")?;
        return Ok(());
    }
    write_rows(rows, format, out)
}

pub fn read_rows<T: for<'de> Deserialize<'de>>(text: &str, format: Format) -> Result<Vec<T>> {
    Ok(match format {
        Format::Csv => csv::Reader::from_reader(text.as_bytes()).deserialize().collect::<Result<_, _>>()?,
        Format::Json => serde_json::from_str(text)?,
    })
}

pub fn write_reports(reports: &[CongruenceReport], format: Format, out: &mut dyn Write) -> Result<()> {
    match format {
        Format::Json => write_rows(reports, format, out),
        Format::Csv => {
            let rows: Vec<ReportRow> = reports
                .iter()
                .map(|r| ReportRow {
                    family: r.family.clone(),
                    rigor: serde_json::to_value(r.rigor).ok().and_then(|v| v.as_str().map(String::from)).unwrap_or_default(),
                    passed: r.passed(),
                    checked: r.checked,
                    failures: r.failures.len(),
                    first_failures: r.failures.iter().take(10).map(u64::to_string).collect::<Vec<_>>().join(" "),
                    n_min: r.n_range.0,
                    n_max: r.n_range.1,
                    precision: r.precision,
                    params: r.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
                    notes: r.notes.join(" | "),
                })
                .collect();
            write_rows(&rows, format, out)
        }
    }
}
