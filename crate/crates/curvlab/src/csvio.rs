//! RFC-4180 tables whose numeric cells round-trip bit for bit.
//!
//! Numbers are written with Rust's shortest round-trip formatting, so
//! `parse::<f64>` recovers the exact bits. `{:?}` always writes a `.`, an
//! exponent, `inf` or `NaN`, so bare digits read back as integers. Empty
//! cells mean "not defined".

use std::io::{Read, Write};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn opt(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Num)
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Int(v) => Some(*v as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    /// Bitwise equality for numbers, so `NaN == NaN` and `0.0 != -0.0`.
    pub fn same(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a.to_bits() == b.to_bits(),
            (a, b) => a == b,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: Vec<String>) -> Self {
        Self { header, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }

    pub fn column(&self, name: &str) -> Option<Vec<Cell>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k].clone()).collect())
    }

    pub fn numbers(&self, name: &str) -> Option<Vec<f64>> {
        self.column(name)?.iter().map(Cell::as_f64).collect()
    }

    pub fn write_to<W: Write>(&self, out: W) -> Result<(), CliError> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(out);
        let wrap = |e: csv::Error| CliError::io("writing CSV", e.into());
        w.write_record(&self.header).map_err(wrap)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).map_err(wrap)?;
        }
        w.flush().map_err(|e| CliError::io("writing CSV", e))
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV output is UTF-8")
    }

    /// Read a table back; cells that parse as `f64` become numbers.
    pub fn read_from<R: Read>(input: R) -> Result<Self, CliError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(input);
        let bad = |e: csv::Error| CliError::Validation(format!("malformed CSV: {e}"));
        let header: Vec<String> = r.headers().map_err(bad)?.iter().map(str::to_string).collect();
        let mut table = Table::new(header);
        for rec in r.records() {
            let rec = rec.map_err(bad)?;
            let row = rec
                .iter()
                .map(|s| {
                    if s.is_empty() {
                        Cell::Empty
                    } else {
                        s.parse::<i64>()
                            .map(Cell::Int)
                            .or_else(|_| s.parse::<f64>().map(Cell::Num))
                            .unwrap_or_else(|_| Cell::Text(s.to_string()))
                    }
                })
                .collect();
            table.rows.push(row);
        }
        Ok(table)
    }

    /// Cell-by-cell bitwise comparison.
    pub fn same(&self, other: &Table) -> bool {
        self.header == other.header
            && self.rows.len() == other.rows.len()
            && self.rows.iter().zip(&other.rows).all(|(a, b)| a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.same(y)))
    }
}
