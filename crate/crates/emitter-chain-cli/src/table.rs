use std::path::Path;

use crate::error::{CliError, Result};

/// Named numeric columns, row-major.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }

    fn check(&self) -> Result<()> {
        for (i, row) in self.rows.iter().enumerate() {
            if row.len() != self.columns.len() {
                return Err(CliError::Ragged {
                    row: i,
                    found: row.len(),
                    expected: self.columns.len(),
                });
            }
            if let Some(j) = row.iter().position(|v| !v.is_finite()) {
                return Err(CliError::NonFinite {
                    column: self.columns[j].clone(),
                    row: i,
                    value: row[j],
                });
            }
        }
        Ok(())
    }
}

/// Integral values print as integers, everything else with 17 significant
/// digits, so every value parses back to the same bits.
pub fn format_value(x: f64) -> String {
    if x == x.trunc() && x.abs() < 1e15 {
        format!("{x:.0}")
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `table` as UTF-8 CSV with a header row. Nothing is written when a
/// row is ragged or holds a non-finite value.
pub fn write_csv(table: &Table, path: &Path) -> Result<()> {
    table.check()?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        })?;
    }
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
        .map_err(csv_err)?;
    w.write_record(&table.columns).map_err(csv_err)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|&v| format_value(v))).map_err(csv_err)?;
    }
    w.flush().map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn read_csv(path: &Path) -> Result<Table> {
    let csv_err = |source| CliError::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_path(path).map_err(csv_err)?;
    let columns: Vec<String> = r.headers().map_err(csv_err)?.iter().map(str::to_string).collect();
    let mut table = Table {
        columns,
        rows: Vec::new(),
    };
    for (i, record) in r.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let row = record
            .iter()
            .enumerate()
            .map(|(j, text)| {
                text.parse::<f64>().map_err(|_| CliError::BadNumber {
                    path: path.to_path_buf(),
                    row: i,
                    column: table.columns.get(j).cloned().unwrap_or_default(),
                    text: text.to_string(),
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        table.rows.push(row);
    }
    Ok(table)
}
