//! Plain numeric tables written as CSV with 17 significant digits, and JSON
//! summaries stamped with the build version.

use std::fs;
use std::path::{Path, PathBuf};

use dapt_core::numerics::{CMatrix, CVector};
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{CliError, CliResult};

pub const VERSION: &str = env!("DAPT_VERSION");

/// Column-named table of reals. Complex quantities occupy two adjacent
/// columns `<name>_re`, `<name>_im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(headers: Vec<String>) -> Self {
        Self { headers, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.headers.len());
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.headers.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv(&self, path: &Path) -> CliResult<()> {
        ensure_parent(path)?;
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut w = csv::Writer::from_path(path).map_err(csv_err)?;
        w.write_record(&self.headers).map_err(csv_err)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|x| format!("{x:.16e}"))).map_err(csv_err)?;
        }
        w.flush().map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn read_csv(path: &Path) -> CliResult<Self> {
        let csv_err = |source| CliError::Csv {
            path: path.to_path_buf(),
            source,
        };
        let mut r = csv::Reader::from_path(path).map_err(csv_err)?;
        let headers = r.headers().map_err(csv_err)?.iter().map(String::from).collect();
        let mut table = Table::new(headers);
        for (i, record) in r.records().enumerate() {
            let record = record.map_err(csv_err)?;
            let row = record
                .iter()
                .map(|tok| {
                    tok.trim().parse::<f64>().map_err(|e| CliError::Input {
                        path: path.to_path_buf(),
                        source: dapt_core::Error::Parse {
                            line: i + 2,
                            message: format!("bad number {tok:?}: {e}"),
                        },
                    })
                })
                .collect::<CliResult<Vec<f64>>>()?;
            table.rows.push(row);
        }
        Ok(table)
    }
}

fn ensure_parent(path: &Path) -> CliResult<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|source| CliError::Io {
            path: dir.to_path_buf(),
            source,
        }),
        _ => Ok(()),
    }
}

pub fn complex_headers(prefix: &str, count: usize) -> Vec<String> {
    (0..count)
        .flat_map(|k| [format!("{prefix}{k}_re"), format!("{prefix}{k}_im")])
        .collect()
}

pub fn matrix_headers(prefix: &str, rows: usize, cols: usize) -> Vec<String> {
    (0..rows)
        .flat_map(|r| (0..cols).flat_map(move |c| [format!("{prefix}_{r}{c}_re"), format!("{prefix}_{r}{c}_im")]))
        .collect()
}

pub fn push_vector(row: &mut Vec<f64>, v: &CVector) {
    for z in v.iter() {
        row.push(z.re);
        row.push(z.im);
    }
}

/// Row-major entries.
pub fn push_matrix(row: &mut Vec<f64>, m: &CMatrix) {
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            row.push(m[(r, c)].re);
            row.push(m[(r, c)].im);
        }
    }
}

/// `[[[re, im], …], …]`
pub fn matrix_json(m: &CMatrix) -> Value {
    Value::Array(
        (0..m.nrows())
            .map(|r| Value::Array((0..m.ncols()).map(|c| json!([m[(r, c)].re, m[(r, c)].im])).collect()))
            .collect(),
    )
}

/// Everything one command produces.
#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub table: Table,
    pub summary: Value,
}

impl Report {
    pub fn to_json(&self, config: &impl Serialize) -> Value {
        json!({
            "command": self.command,
            "version": VERSION,
            "config": config,
            "summary": self.summary,
        })
    }

    /// Write the table and the summary; returns the paths written.
    pub fn write(&self, csv: &Path, json_path: &Path, config: &impl Serialize) -> CliResult<Vec<PathBuf>> {
        self.table.write_csv(csv)?;
        ensure_parent(json_path)?;
        let text = serde_json::to_string_pretty(&self.to_json(config)).expect("JSON values serialize");
        fs::write(json_path, text + "\n").map_err(|source| CliError::Io {
            path: json_path.to_path_buf(),
            source,
        })?;
        Ok(vec![csv.to_path_buf(), json_path.to_path_buf()])
    }
}
