//! Tabular output. Every subcommand builds a [`Table`]; the writer renders it
//! as CSV with a header row or as JSON lines with one object per row.

use gausslab::exponents::{render, to_f64, Rational};
use std::io::Write;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Real(f64),
    Text(String),
    Bool(bool),
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => match i64::try_from(*v) {
                Ok(x) => x.into(),
                Err(_) => v.to_string().into(),
            },
            Cell::Real(v) => serde_json::Number::from_f64(*v).map_or_else(|| v.to_string().into(), Into::into),
            Cell::Text(s) => s.clone().into(),
            Cell::Bool(b) => (*b).into(),
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

macro_rules! int_cell {
    ($($t:ty),*) => {$(
        impl From<$t> for Cell {
            fn from(v: $t) -> Self {
                Cell::Int(v as i128)
            }
        }
    )*};
}
int_cell!(i8, i32, i64, i128, u32, u64, usize);

impl From<u128> for Cell {
    fn from(v: u128) -> Self {
        i128::try_from(v).map_or_else(|_| Cell::Text(v.to_string()), Cell::Int)
    }
}

impl From<gausslab::GaussianInt> for Cell {
    fn from(v: gausslab::GaussianInt) -> Self {
        Cell::Text(v.to_string())
    }
}

/// An exact exponent as two cells, "p/q" and its decimal value.
pub fn exact(r: &Rational) -> [Cell; 2] {
    [Cell::Text(render(r)), Cell::Real(to_f64(r))]
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self { headers: headers.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.headers.len(), "row width for {:?}", self.headers);
        self.rows.push(row);
    }

    pub fn write(&self, format: Format, out: &mut dyn Write) -> std::io::Result<()> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.headers)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(Cell::csv))?;
                }
                w.flush()
            }
            Format::Json => {
                for row in &self.rows {
                    let obj: serde_json::Map<String, serde_json::Value> =
                        self.headers.iter().zip(row).map(|(h, c)| (h.to_string(), c.json())).collect();
                    serde_json::to_writer(&mut *out, &obj)?;
                    out.write_all(b"\n")?;
                }
                out.flush()
            }
        }
    }
}
