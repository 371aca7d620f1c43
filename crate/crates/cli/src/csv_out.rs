//! The sweep CSV format.
//!
//! Comma delimited, LF line endings, numbers in scientific notation with 12
//! significant digits. Every column is always present; missing values are
//! empty fields.

use std::io::{Read, Write};

use thiserror::Error;

use crate::sweep::{Status, SweepRow};

pub const HEADER: [&str; 9] = ["u", "tau", "tau_i", "tau_s", "norm", "norm_i", "norm_s", "t_max_used", "status"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("row {row}: {message}")]
    Field { row: usize, message: String },
    #[error("no data rows")]
    Empty,
}

pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

fn field(v: Option<f64>) -> String {
    v.map(format_number).unwrap_or_default()
}

pub fn write_rows<W: Write>(out: W, rows: &[SweepRow]) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for r in rows {
        w.write_record([
            format_number(r.u),
            field(r.tau),
            field(r.tau_i),
            field(r.tau_s),
            field(r.norm),
            field(r.norm_i),
            field(r.norm_s),
            field(r.t_max_used),
            r.status.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn to_string(rows: &[SweepRow]) -> String {
    let mut buf = Vec::new();
    write_rows(&mut buf, rows).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Reads a sweep CSV back, checking the header exactly.
pub fn read_rows<R: Read>(input: R) -> Result<Vec<SweepRow>, CsvError> {
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
    let header = r.headers()?.clone();
    if header.iter().ne(HEADER) {
        return Err(CsvError::Header {
            found: header.iter().map(String::from).collect(),
        });
    }
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = i + 1;
        let num = |k: usize| -> Result<Option<f64>, CsvError> {
            let s = rec.get(k).unwrap_or("");
            if s.is_empty() {
                return Ok(None);
            }
            s.parse().map(Some).map_err(|_| CsvError::Field {
                row,
                message: format!("`{s}` in column {} is not a number", HEADER[k]),
            })
        };
        let u = num(0)?.ok_or(CsvError::Field {
            row,
            message: "missing u".into(),
        })?;
        let status: Status = rec
            .get(8)
            .unwrap_or("")
            .parse()
            .map_err(|message| CsvError::Field { row, message })?;
        rows.push(SweepRow {
            u,
            tau: num(1)?,
            tau_i: num(2)?,
            tau_s: num(3)?,
            norm: num(4)?,
            norm_i: num(5)?,
            norm_s: num(6)?,
            t_max_used: num(7)?,
            status,
        });
    }
    if rows.is_empty() {
        return Err(CsvError::Empty);
    }
    Ok(rows)
}
