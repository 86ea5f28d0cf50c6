use std::io::Read;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// An `n × p` numeric sample with one named column per variable.
#[derive(Debug, Clone)]
pub struct Dataset {
    names: Vec<String>,
    values: DMatrix<f64>,
}

impl Dataset {
    pub fn new(names: Vec<String>, values: DMatrix<f64>) -> Result<Self> {
        if names.len() != values.ncols() {
            return Err(Error::InvalidParameter(format!(
                "{} names for {} columns",
                names.len(),
                values.ncols()
            )));
        }
        if let Some(k) = values.iter().position(|x| !x.is_finite()) {
            let (row, column) = (k % values.nrows(), k / values.nrows());
            return Err(Error::Csv { row: row + 1, column: column + 1, message: "non-finite value".into() });
        }
        Ok(Dataset { names, values })
    }

    /// Columns named `x1, x2, ...`.
    pub fn unnamed(values: DMatrix<f64>) -> Result<Self> {
        let names = (1..=values.ncols()).map(|k| format!("x{k}")).collect();
        Dataset::new(names, values)
    }

    /// Reads a CSV with a header row of variable names and one observation
    /// per row. Row and column numbers in errors are 1-based, counting the
    /// header as row 1.
    pub fn from_csv_reader<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
        let csv_err = |row: usize, e: csv::Error| Error::Csv { row, column: 0, message: e.to_string() };
        let names: Vec<String> = rdr.headers().map_err(|e| csv_err(1, e))?.iter().map(str::to_string).collect();
        if names.is_empty() || names.iter().all(String::is_empty) {
            return Err(Error::Csv { row: 1, column: 0, message: "missing header row".into() });
        }
        let p = names.len();
        let mut data = Vec::new();
        let mut n = 0;
        for (k, record) in rdr.records().enumerate() {
            let row = k + 2;
            let record = record.map_err(|e| csv_err(row, e))?;
            if record.len() != p {
                return Err(Error::Csv {
                    row,
                    column: record.len().min(p) + 1,
                    message: format!("expected {p} fields, found {}", record.len()),
                });
            }
            for (c, field) in record.iter().enumerate() {
                let value: f64 = field.parse().map_err(|_| Error::Csv {
                    row,
                    column: c + 1,
                    message: format!("not a number: {field:?}"),
                })?;
                if !value.is_finite() {
                    return Err(Error::Csv { row, column: c + 1, message: "non-finite value".into() });
                }
                data.push(value);
            }
            n += 1;
        }
        Dataset::new(names, DMatrix::from_row_slice(n, p, &data))
    }

    pub fn from_csv_path(path: impl AsRef<Path>) -> Result<Self> {
        Dataset::from_csv_reader(std::fs::File::open(path)?)
    }

    /// Writes the header and rows; values use the shortest round-tripping
    /// decimal form.
    pub fn write_csv<W: std::io::Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
        w.write_record(&self.names).map_err(io)?;
        for row in self.values.row_iter() {
            w.write_record(row.iter().map(|x| x.to_string())).map_err(io)?;
        }
        w.flush()?;
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }
}
