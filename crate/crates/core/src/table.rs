// Copyright 2026 The Scarf Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! Categorical table ingestion and the per-value bitmap index.
//!
//! Input is a comma- or semicolon-separated file whose first line names the
//! columns. Every cell is a single character; longer cells are truncated to
//! their first character and empty cells are N/A.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::bitmap::Bitmap;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TableError {
    #[error("input is empty: no header line")]
    EmptyInput,
    #[error("input is not valid UTF-8 (at byte {0})")]
    InvalidUtf8(usize),
    #[error("header has {0} field(s); at least two columns are required")]
    HeaderTooShort(usize),
    #[error("line {line}: expected {expected} fields, found {found}")]
    RaggedRow {
        line: usize,
        expected: usize,
        found: usize,
    },
    #[error("duplicate column name {0:?}")]
    DuplicateColumn(String),
    #[error("unknown column {0:?}")]
    UnknownColumn(String),
    #[error("value {value:?} does not occur in column {column:?}")]
    UnknownValue { column: String, value: char },
    #[error("empty value set for column {0:?}")]
    EmptyValueSet(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Delimiter {
    Comma,
    Semicolon,
}

impl Delimiter {
    pub fn as_char(self) -> char {
        match self {
            Delimiter::Comma => ',',
            Delimiter::Semicolon => ';',
        }
    }

    /// Pick whichever delimiter splits the header into more fields.
    /// Ties go to comma.
    pub fn detect(header: &str) -> Delimiter {
        let commas = header.matches(',').count();
        let semis = header.matches(';').count();
        if semis > commas {
            Delimiter::Semicolon
        } else {
            Delimiter::Comma
        }
    }
}

/// A parsed table: named columns and rows of optional single-character cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DataTable {
    columns: Vec<String>,
    rows: Vec<Vec<Option<char>>>,
}

impl DataTable {
    /// Build a table from already-split cells, enforcing the table invariants.
    pub fn new(columns: Vec<String>, rows: Vec<Vec<Option<char>>>) -> Result<Self, TableError> {
        if columns.len() < 2 {
            return Err(TableError::HeaderTooShort(columns.len()));
        }
        let mut seen = BTreeSet::new();
        for name in &columns {
            if !seen.insert(name.as_str()) {
                return Err(TableError::DuplicateColumn(name.clone()));
            }
        }
        for (i, row) in rows.iter().enumerate() {
            if row.len() != columns.len() {
                return Err(TableError::RaggedRow {
                    line: i + 2,
                    expected: columns.len(),
                    found: row.len(),
                });
            }
        }
        Ok(DataTable { columns, rows })
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Option<char>>] {
        &self.rows
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    #[inline]
    pub fn cell(&self, row: usize, column: usize) -> Option<char> {
        self.rows[row][column]
    }

    /// Distinct non-N/A values of `column`, sorted.
    pub fn dictionary(&self, column: usize) -> Vec<char> {
        self.rows
            .iter()
            .filter_map(|r| r[column])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Serialize back to delimited text; N/A cells become empty fields.
    pub fn to_csv(&self, delimiter: Delimiter) -> String {
        let d = delimiter.as_char().to_string();
        let mut out = self.columns.join(&d);
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| c.map(String::from).unwrap_or_default())
                .collect();
            out.push_str(&cells.join(&d));
            out.push('\n');
        }
        out
    }
}

/// Parse a table, detecting the delimiter from the header line.
pub fn parse_csv(input: &[u8]) -> Result<DataTable, TableError> {
    parse_csv_with(input, None)
}

/// Parse a table with an optional explicit delimiter.
pub fn parse_csv_with(input: &[u8], delimiter: Option<Delimiter>) -> Result<DataTable, TableError> {
    let text = std::str::from_utf8(input).map_err(|e| TableError::InvalidUtf8(e.valid_up_to()))?;
    let mut lines = text
        .split('\n')
        .map(|l| l.strip_suffix('\r').unwrap_or(l))
        .enumerate();

    let header = loop {
        match lines.next() {
            None => return Err(TableError::EmptyInput),
            Some((_, l)) if l.trim().is_empty() => continue,
            Some((_, l)) => break l,
        }
    };
    let delim = delimiter.unwrap_or_else(|| Delimiter::detect(header)).as_char();
    let columns: Vec<String> = header.split(delim).map(|f| f.trim().to_string()).collect();
    let width = columns.len();
    if width < 2 {
        return Err(TableError::HeaderTooShort(width));
    }

    let mut rows = Vec::new();
    for (idx, line) in lines {
        if line.is_empty() {
            continue;
        }
        let row: Vec<Option<char>> = line.split(delim).map(|f| f.chars().next()).collect();
        if row.len() != width {
            return Err(TableError::RaggedRow {
                line: idx + 1,
                expected: width,
                found: row.len(),
            });
        }
        rows.push(row);
    }
    DataTable::new(columns, rows)
}

/// Per-column dictionaries plus one bitmap per (column, value) pair.
#[derive(Debug, Clone)]
pub struct BitmapIndex {
    columns: Vec<String>,
    n_rows: usize,
    dictionaries: Vec<Vec<char>>,
    bitmaps: Vec<Vec<Bitmap>>,
    present: Vec<Bitmap>,
}

pub fn build_index(table: &DataTable) -> BitmapIndex {
    let n = table.n_rows();
    let mut dictionaries = Vec::with_capacity(table.n_columns());
    let mut bitmaps = Vec::with_capacity(table.n_columns());
    let mut present = Vec::with_capacity(table.n_columns());
    for c in 0..table.n_columns() {
        let dict = table.dictionary(c);
        let mut maps = vec![Bitmap::zeros(n); dict.len()];
        let mut some = Bitmap::zeros(n);
        for (r, row) in table.rows().iter().enumerate() {
            if let Some(v) = row[c] {
                // dictionary is sorted, so binary search is exact
                let slot = dict.binary_search(&v).expect("value missing from its own dictionary");
                maps[slot].set(r);
                some.set(r);
            }
        }
        dictionaries.push(dict);
        bitmaps.push(maps);
        present.push(some);
    }
    BitmapIndex {
        columns: table.columns().to_vec(),
        n_rows: n,
        dictionaries,
        bitmaps,
        present,
    }
}

impl BitmapIndex {
    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_columns(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Sorted distinct values of `column`.
    pub fn dictionary(&self, column: usize) -> &[char] {
        &self.dictionaries[column]
    }

    /// Bitmap of rows where `column` equals the `slot`-th dictionary value.
    pub fn value_bitmap(&self, column: usize, slot: usize) -> &Bitmap {
        &self.bitmaps[column][slot]
    }

    pub fn bitmap(&self, column: usize, value: char) -> Option<&Bitmap> {
        let slot = self.dictionaries[column].binary_search(&value).ok()?;
        Some(&self.bitmaps[column][slot])
    }

    /// Rows where `column` is not N/A.
    pub fn present(&self, column: usize) -> &Bitmap {
        &self.present[column]
    }

    /// Rows where `column` takes any of `values`. N/A rows are never set.
    pub fn eval_equality(&self, column: &str, values: &[char]) -> Result<Bitmap, TableError> {
        let c = self
            .column_index(column)
            .ok_or_else(|| TableError::UnknownColumn(column.to_string()))?;
        self.eval_equality_at(c, values)
    }

    pub fn eval_equality_at(&self, column: usize, values: &[char]) -> Result<Bitmap, TableError> {
        if values.is_empty() {
            return Err(TableError::EmptyValueSet(self.columns[column].clone()));
        }
        let mut out = Bitmap::zeros(self.n_rows);
        for &v in values {
            let bm = self.bitmap(column, v).ok_or_else(|| TableError::UnknownValue {
                column: self.columns[column].clone(),
                value: v,
            })?;
            out.or_assign(bm);
        }
        Ok(out)
    }
}
