//! In-memory tables of text cells.
//!
//! Every cell is either text or [`Cell::Missing`]. No numeric coercion happens
//! on load; the standardizers own all interpretation of cell contents.

use std::collections::HashSet;
use std::fmt;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("input has no header row")]
    EmptyInput,
    #[error("row {row} has {found} fields, header has {expected}")]
    RaggedRow {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateHeader(String),
    #[error("column {0} has an empty name")]
    EmptyColumnName(usize),
    #[error("input is not valid UTF-8 CSV: {0}")]
    Malformed(String),
    #[error("i/o failure: {0}")]
    IoFailure(#[from] std::io::Error),
}

/// A single table cell.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Text(String),
    Missing,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            Cell::Missing => None,
        }
    }

    pub fn is_missing(&self) -> bool {
        matches!(self, Cell::Missing)
    }
}

impl From<Option<String>> for Cell {
    fn from(value: Option<String>) -> Self {
        value.map_or(Cell::Missing, Cell::Text)
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Text(s) => f.write_str(s),
            Cell::Missing => f.write_str("NaN"),
        }
    }
}

/// Options shared by CSV reading and writing.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IngestOptions {
    /// Field text that stands for a missing cell. Empty by default.
    pub nan_token: String,
}

impl IngestOptions {
    pub fn with_nan_token(nan_token: impl Into<String>) -> Self {
        Self {
            nan_token: nan_token.into(),
        }
    }
}

/// Rectangular grid of cells with unique, non-empty column names.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TableInfo {
    pub rows: usize,
    pub cols: usize,
    pub columns: Vec<String>,
}

impl Table {
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Cell>>) -> Result<Self, TableError> {
        if columns.is_empty() {
            return Err(TableError::EmptyInput);
        }
        let mut seen = HashSet::with_capacity(columns.len());
        for (i, name) in columns.iter().enumerate() {
            if name.is_empty() {
                return Err(TableError::EmptyColumnName(i));
            }
            if !seen.insert(name.as_str()) {
                return Err(TableError::DuplicateHeader(name.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(TableError::RaggedRow {
                    row: i + 1,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
        }
        Ok(Self { columns, rows })
    }

    /// Builds a table from string literals; `None` cells are missing.
    pub fn from_strs(columns: &[&str], rows: &[&[Option<&str>]]) -> Result<Self, TableError> {
        Self::new(
            columns.iter().map(|c| c.to_string()).collect(),
            rows.iter()
                .map(|r| r.iter().map(|c| c.map_or(Cell::Missing, Cell::text)).collect())
                .collect(),
        )
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn column_count(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn column(&self, index: usize) -> impl ExactSizeIterator<Item = &Cell> + '_ {
        self.rows.iter().map(move |r| &r[index])
    }

    pub fn cell(&self, row: usize, col: usize) -> &Cell {
        &self.rows[row][col]
    }

    pub fn info(&self) -> TableInfo {
        TableInfo {
            rows: self.row_count(),
            cols: self.column_count(),
            columns: self.columns.clone(),
        }
    }

    /// Returns a copy with the column at `index` replaced by `cells`.
    pub(crate) fn with_column(&self, index: usize, cells: Vec<Cell>) -> Table {
        debug_assert_eq!(cells.len(), self.rows.len());
        let rows = self
            .rows
            .iter()
            .zip(cells)
            .map(|(row, cell)| {
                let mut row = row.clone();
                row[index] = cell;
                row
            })
            .collect();
        Table {
            columns: self.columns.clone(),
            rows,
        }
    }
}

pub fn table_info(table: &Table) -> TableInfo {
    table.info()
}

/// Reads a headed CSV document. LF and CRLF line endings are both accepted.
pub fn load_csv<R: Read>(source: R, options: &IngestOptions) -> Result<Table, TableError> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(source);

    let mut records = reader.records();
    let header = match records.next() {
        None => return Err(TableError::EmptyInput),
        Some(rec) => rec.map_err(csv_error)?,
    };
    let columns: Vec<String> = header.iter().map(str::to_owned).collect();
    if columns.len() == 1 && columns[0].is_empty() {
        return Err(TableError::EmptyInput);
    }

    let mut rows = Vec::new();
    for (i, rec) in records.enumerate() {
        let rec = rec.map_err(csv_error)?;
        if rec.len() != columns.len() {
            return Err(TableError::RaggedRow {
                row: i + 1,
                expected: columns.len(),
                found: rec.len(),
            });
        }
        rows.push(
            rec.iter()
                .map(|field| {
                    if field == options.nan_token {
                        Cell::Missing
                    } else {
                        Cell::text(field)
                    }
                })
                .collect(),
        );
    }
    Table::new(columns, rows)
}

fn csv_error(err: csv::Error) -> TableError {
    match err.into_kind() {
        csv::ErrorKind::Io(e) => TableError::IoFailure(e),
        other => TableError::Malformed(format!("{other:?}")),
    }
}

/// Writes RFC 4180 CSV with LF line endings, quoting only where needed.
pub fn save_csv<W: Write>(table: &Table, sink: W, options: &IngestOptions) -> Result<(), TableError> {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .quote_style(csv::QuoteStyle::Necessary)
        .from_writer(sink);
    write_records(&mut writer, table, table.rows.iter(), options)?;
    writer.flush()?;
    Ok(())
}

fn write_records<'a, W: Write>(
    writer: &mut csv::Writer<W>,
    table: &Table,
    rows: impl Iterator<Item = &'a Vec<Cell>>,
    options: &IngestOptions,
) -> Result<(), TableError> {
    writer.write_record(&table.columns).map_err(csv_error)?;
    for row in rows {
        writer
            .write_record(row.iter().map(|c| match c {
                Cell::Text(s) => s.as_str(),
                Cell::Missing => options.nan_token.as_str(),
            }))
            .map_err(csv_error)?;
    }
    Ok(())
}

/// CSV text of the header plus the first `min(k, m)` rows.
///
/// Output depends only on the table contents, so prompts built from it are
/// stable cache keys.
pub fn sample_rows(table: &Table, k: usize) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let options = IngestOptions::default();
    write_records(&mut writer, table, table.rows.iter().take(k.max(1)), &options)
        .expect("writing to memory cannot fail");
    let bytes = writer.into_inner().expect("writing to memory cannot fail");
    String::from_utf8(bytes).expect("cells are valid UTF-8")
}
