use std::io::Write;

use csv::{Terminator, WriterBuilder};

use super::StudyRecord;
use crate::error::Result;

pub const CSV_HEADER: [&str; 11] = [
    "p",
    "alpha",
    "pi",
    "beta",
    "N",
    "method",
    "value",
    "std_error",
    "mu_limit",
    "abs_err",
    "condition_satisfied",
];

/// Shortest decimal string that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    format!("{x:?}")
}

fn row(r: &StudyRecord) -> [String; 11] {
    [
        format_float(r.p),
        format_float(r.alpha),
        format_float(r.pi),
        format_float(r.beta),
        r.n.map(|n| n.to_string()).unwrap_or_default(),
        r.method.to_string(),
        format_float(r.value),
        r.std_error.map(format_float).unwrap_or_default(),
        format_float(r.mu_limit),
        format_float(r.abs_err),
        r.condition_satisfied.to_string(),
    ]
}

/// Write rows as LF-terminated CSV, optionally preceded by the header.
pub fn write_records<W: Write>(out: W, records: &[StudyRecord], header: bool) -> Result<()> {
    let mut w = WriterBuilder::new()
        .terminator(Terminator::Any(b'\n'))
        .from_writer(out);
    if header {
        w.write_record(CSV_HEADER)?;
    }
    for r in records {
        w.write_record(row(r))?;
    }
    w.flush()?;
    Ok(())
}
