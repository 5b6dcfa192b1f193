//! Complex matrices as CSV: one row per matrix row, a leading `mode` label
//! column, then `<label>.re`, `<label>.im` per matrix column. Numbers use the
//! shortest representation that parses back to the same `f64`.

use crate::error::{CliError, Result};
use std::path::Path;
use wsdelay::{CMat, C64};

pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn write_matrix(path: &Path, m: &CMat, labels: &[String]) -> Result<()> {
    if labels.len() != m.nrows() || m.nrows() != m.ncols() {
        return Err(CliError::Matrix(format!(
            "{} labels for a {}x{} matrix",
            labels.len(),
            m.nrows(),
            m.ncols()
        )));
    }
    write_rect(path, m, labels, labels)
}

pub fn write_rect(path: &Path, m: &CMat, row_labels: &[String], col_labels: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = vec!["mode".to_string()];
    for l in col_labels {
        header.push(format!("{l}.re"));
        header.push(format!("{l}.im"));
    }
    w.write_record(&header)?;
    for (i, label) in row_labels.iter().enumerate() {
        let mut rec = vec![label.clone()];
        for j in 0..m.ncols() {
            rec.push(num(m[(i, j)].re));
            rec.push(num(m[(i, j)].im));
        }
        w.write_record(&rec)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}

/// Row labels, column labels and values of a file written by [`write_rect`].
pub fn read_matrix(path: &Path) -> Result<(Vec<String>, Vec<String>, CMat)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.clone();
    if header.len() % 2 != 1 || header.get(0) != Some("mode") {
        return Err(CliError::Matrix(format!("{}: unexpected header", path.display())));
    }
    let mut cols = Vec::new();
    for k in (1..header.len()).step_by(2) {
        let re = &header[k];
        let label = re
            .strip_suffix(".re")
            .ok_or_else(|| CliError::Matrix(format!("column `{re}` is not a real part")))?;
        if header[k + 1] != format!("{label}.im") {
            return Err(CliError::Matrix(format!("column after `{re}` is not its imaginary part")));
        }
        cols.push(label.to_string());
    }
    let nc = cols.len();
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        rows.push(rec[0].to_string());
        for k in 0..nc {
            let parse = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| CliError::Matrix(format!("`{s}` is not a number")))
            };
            values.push(C64::new(parse(&rec[1 + 2 * k])?, parse(&rec[2 + 2 * k])?));
        }
    }
    let m = CMat::from_row_slice(rows.len(), nc, &values);
    Ok((rows, cols, m))
}

/// Plain table with a header row.
pub fn write_table(path: &Path, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    w.flush().map_err(|e| CliError::io(path, e))?;
    Ok(())
}
