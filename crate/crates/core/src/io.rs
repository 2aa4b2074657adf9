//! CSV reading and writing: comma separated, `.` decimals, LF line endings,
//! mandatory header, missing cells as empty fields.

use std::io::{Read, Write};

use thiserror::Error;

use crate::graph::Table;
use crate::missing::MaskedDataset;

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("row {row}, column `{column}`: {message}")]
    Value { row: usize, column: String, message: String },
    #[error("{0}")]
    Shape(String),
}

impl CsvError {
    /// True for failures of the underlying reader or writer rather than bad content.
    pub fn is_io(&self) -> bool {
        match self {
            CsvError::Io(_) => true,
            CsvError::Csv(e) => e.is_io_error(),
            _ => false,
        }
    }
}

fn writer<W: Write>(w: W) -> csv::Writer<W> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(w)
}

/// Shortest decimal text that reads back to the same value.
pub fn fmt_value(x: f64) -> String {
    format!("{x}")
}

pub fn write_table<W: Write>(w: W, t: &Table) -> Result<(), CsvError> {
    let mut out = writer(w);
    out.write_record(&t.names)?;
    for row in &t.rows {
        out.write_record(row.iter().map(|v| fmt_value(*v)))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a fully observed numeric table.
pub fn read_table<R: Read>(r: R) -> Result<Table, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let names: Vec<String> = rdr.headers()?.iter().map(|h| h.trim().to_string()).collect();
    if names.is_empty() || names.iter().any(String::is_empty) {
        return Err(CsvError::Shape("header has an empty column name".into()));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .zip(&names)
            .map(|(cell, column)| {
                let cell = cell.trim();
                cell.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .ok_or_else(|| CsvError::Value {
                        row: i + 1,
                        column: column.clone(),
                        message: if cell.is_empty() {
                            "missing value".into()
                        } else {
                            format!("`{cell}` is not a finite number")
                        },
                    })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Table::new(names, rows).map_err(|e| CsvError::Shape(e.to_string()))
}

/// Values with missing cells left empty.
pub fn write_masked<W: Write>(w: W, m: &MaskedDataset) -> Result<(), CsvError> {
    let mut out = writer(w);
    out.write_record(&m.names)?;
    for (row, miss) in m.values.iter().zip(&m.missing) {
        out.write_record(row.iter().zip(miss).map(|(v, &gone)| if gone { String::new() } else { fmt_value(*v) }))?;
    }
    out.flush()?;
    Ok(())
}

/// 0/1 flags, `1` = missing.
pub fn write_mask<W: Write>(w: W, m: &MaskedDataset) -> Result<(), CsvError> {
    let mut out = writer(w);
    out.write_record(&m.names)?;
    for miss in &m.missing {
        out.write_record(miss.iter().map(|&gone| if gone { "1" } else { "0" }))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a table whose empty cells are missing; they come back as `NaN`.
pub fn read_with_missing<R: Read>(r: R) -> Result<Table, CsvError> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).from_reader(r);
    let names: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .zip(&names)
            .map(|(cell, column)| {
                if cell.is_empty() {
                    return Ok(f64::NAN);
                }
                cell.parse::<f64>().map_err(|_| CsvError::Value {
                    row: i + 1,
                    column: column.clone(),
                    message: format!("`{cell}` is not a number"),
                })
            })
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Table::new(names, rows).map_err(|e| CsvError::Shape(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_exact() {
        let t = Table::new(
            vec!["a".into(), "b c".into()],
            vec![vec![0.1 + 0.2, -1e-300], vec![1.0, 123456789.125]],
        )
        .unwrap();
        let mut buf = Vec::new();
        write_table(&mut buf, &t).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("a,b c\n0.30000000000000004,"));
        assert!(!text.contains('\r'));
        assert_eq!(read_table(&buf[..]).unwrap(), t);
    }

    #[test]
    fn bad_cells_are_reported() {
        let err = read_table("x,y\n1,2\n3,\n".as_bytes()).unwrap_err();
        assert!(matches!(err, CsvError::Value { row: 2, ref column, .. } if column == "y"));
        assert!(!err.is_io());
        assert!(read_table("x,y\n1,2,3\n".as_bytes()).is_err());
        assert!(read_table("x\nnan\n".as_bytes()).is_err());
    }

    #[test]
    fn masked_cells_are_empty() {
        let m = MaskedDataset {
            names: vec!["a".into(), "b".into()],
            values: vec![vec![1.5, 2.0], vec![3.0, 4.0]],
            missing: vec![vec![true, false], vec![false, true]],
            achieved_ratio: vec![0.5, 0.5],
        };
        let mut buf = Vec::new();
        write_masked(&mut buf, &m).unwrap();
        assert_eq!(String::from_utf8(buf.clone()).unwrap(), "a,b\n,2\n3,\n");
        let back = read_with_missing(&buf[..]).unwrap();
        assert!(back.rows[0][0].is_nan() && back.rows[1][1].is_nan());
        let mut buf = Vec::new();
        write_mask(&mut buf, &m).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "a,b\n1,0\n0,1\n");
    }
}
