//! Trajectory files: header `t,c_1,c_q,c_p,c_qq,c_qp,c_pp`, one row per
//! sample time, every value with 17 significant digits so that reading a
//! file back reproduces the `f64`s exactly.

use std::io::{Read, Write};

use heisenberg_dual::dynamics::{CoeffState, Trajectory};
use thiserror::Error;

pub const HEADER: [&str; 7] = ["t", "c_1", "c_q", "c_p", "c_qq", "c_qp", "c_pp"];

#[derive(Debug, Error)]
pub enum CsvError {
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("unexpected header {found:?}")]
    Header { found: Vec<String> },
    #[error("row {row}: `{text}` is not a number")]
    Number { row: usize, text: String },
}

/// Seventeen significant digits, exponent notation.
pub fn format_value(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_trajectory<W: Write>(out: W, traj: &Trajectory) -> Result<(), CsvError> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(HEADER)?;
    for (t, k) in traj {
        let mut row = vec![format_value(*t)];
        row.extend(k.to_array().iter().map(|&c| format_value(c)));
        w.write_record(&row)?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn read_trajectory<R: Read>(input: R) -> Result<Trajectory, CsvError> {
    let mut r = csv::ReaderBuilder::new().from_reader(input);
    let header = r.headers()?;
    if header.iter().ne(HEADER) {
        return Err(CsvError::Header {
            found: header.iter().map(String::from).collect(),
        });
    }
    let mut out = Trajectory::new();
    for (row, record) in r.records().enumerate() {
        let record = record?;
        let mut values = [0.0; 7];
        for (slot, text) in values.iter_mut().zip(record.iter()) {
            *slot = text.parse().map_err(|_| CsvError::Number {
                row: row + 1,
                text: text.to_string(),
            })?;
        }
        let [t, c @ ..] = values;
        out.push((t, CoeffState::from_array(c)));
    }
    Ok(out)
}
