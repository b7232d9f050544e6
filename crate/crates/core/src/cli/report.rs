//! Tabular command output: CSV with a header row, or the same records as
//! JSON objects keyed by column name.
//!
//! Float cells are rendered with 9 significant digits in scientific
//! notation, which keeps rows byte-stable across runs.

use std::io::Write;

use crate::error::Result;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    U(u64),
    F(f64),
    S(String),
    B(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::U(v) => v.to_string(),
            Cell::F(v) => format_sig9(*v),
            Cell::S(v) => v.clone(),
            Cell::B(v) => v.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::U(v) => serde_json::Value::from(*v),
            Cell::F(v) => serde_json::Value::from(*v),
            Cell::S(v) => serde_json::Value::from(v.as_str()),
            Cell::B(v) => serde_json::Value::from(*v),
        }
    }
}

/// Nine significant digits, scientific notation.
pub fn format_sig9(v: f64) -> String {
    format!("{v:.8e}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone)]
pub struct Report {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Report {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write(&self, out: &mut dyn Write, format: OutputFormat) -> Result<()> {
        match format {
            OutputFormat::Csv => {
                writeln!(out, "{}", self.columns.join(","))?;
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::csv).collect();
                    writeln!(out, "{}", line.join(","))?;
                }
            }
            OutputFormat::Json => {
                let records: Vec<serde_json::Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        serde_json::Value::Object(
                            self.columns
                                .iter()
                                .zip(row)
                                .map(|(&c, cell)| (c.to_string(), cell.json()))
                                .collect(),
                        )
                    })
                    .collect();
                serde_json::to_writer_pretty(&mut *out, &records).map_err(std::io::Error::other)?;
                writeln!(out)?;
            }
        }
        Ok(())
    }
}
