//! Column tables written as CSV (17 significant digits, one header row) or JSON.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::CliError;

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    /// Column-major; `None` leaves the cell empty (CSV) or null (JSON).
    pub columns: Vec<Vec<Option<f64>>>,
}

impl Table {
    pub fn new() -> Self {
        Table::default()
    }

    pub fn column(mut self, name: &str, values: impl IntoIterator<Item = f64>) -> Self {
        self.header.push(name.to_string());
        self.columns.push(values.into_iter().map(Some).collect());
        self
    }

    pub fn optional_column(mut self, name: &str, values: Option<Vec<f64>>, len: usize) -> Self {
        self.header.push(name.to_string());
        self.columns.push(match values {
            Some(v) => v.into_iter().map(Some).collect(),
            None => vec![None; len],
        });
        self
    }

    pub fn rows(&self) -> usize {
        self.columns.first().map_or(0, Vec::len)
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for i in 0..self.rows() {
            for (j, col) in self.columns.iter().enumerate() {
                if j > 0 {
                    out.push(',');
                }
                if let Some(v) = col[i] {
                    write!(out, "{v:.16e}").expect("writing to a String");
                }
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            columns: &'a [String],
            rows: Vec<Vec<Option<f64>>>,
        }
        let rows = (0..self.rows()).map(|i| self.columns.iter().map(|c| c[i]).collect()).collect();
        let mut s = serde_json::to_string_pretty(&Doc { columns: &self.header, rows }).expect("serializable table");
        s.push('\n');
        s
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn create_dir(path: &Path) -> Result<(), CliError> {
    fs::create_dir_all(path).map_err(|source| CliError::Io { path: path.to_path_buf(), source })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut s = serde_json::to_string_pretty(value).expect("serializable report");
    s.push('\n');
    write_file(path, &s)
}
