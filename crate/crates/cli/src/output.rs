use std::io::{self, Write};

use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Tsv,
    Csv,
    Json,
}

/// What a command prints.
pub enum Output {
    /// A set of names; TSV prints them space-separated on one line.
    Set { key: &'static str, items: Vec<String> },
    Table { columns: Vec<String>, rows: Vec<Vec<String>> },
    /// Pre-rendered text (CSV plot data, model documents), printed as is.
    Raw(String),
}

impl Output {
    pub fn table<const N: usize>(columns: [&str; N], rows: Vec<[String; N]>) -> Self {
        Output::Table {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: rows.into_iter().map(|r| r.to_vec()).collect(),
        }
    }

    /// Two-column key/value table.
    pub fn pairs(rows: Vec<(&str, String)>) -> Self {
        Output::table(["field", "value"], rows.into_iter().map(|(k, v)| [k.to_string(), v]).collect())
    }

    pub fn write(&self, format: Format, out: &mut impl Write) -> io::Result<()> {
        match (self, format) {
            (Output::Raw(text), _) => out.write_all(text.as_bytes()),
            (Output::Set { items, .. }, Format::Tsv) => writeln!(out, "{}", items.join(" ")),
            (Output::Set { items, .. }, Format::Csv) => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(items)?;
                w.flush()
            }
            (Output::Set { key, items }, Format::Json) => {
                let mut m = Map::new();
                m.insert(key.to_string(), Value::from(items.clone()));
                writeln!(out, "{}", Value::Object(m))
            }
            (Output::Table { columns, rows }, Format::Tsv) => {
                writeln!(out, "{}", columns.join("\t"))?;
                for r in rows {
                    writeln!(out, "{}", r.join("\t"))?;
                }
                Ok(())
            }
            (Output::Table { columns, rows }, Format::Csv) => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(columns)?;
                for r in rows {
                    w.write_record(r)?;
                }
                w.flush()
            }
            (Output::Table { columns, rows }, Format::Json) => {
                let arr: Vec<Value> = rows
                    .iter()
                    .map(|r| {
                        let m: Map<String, Value> =
                            columns.iter().cloned().zip(r.iter().map(|v| Value::from(v.clone()))).collect();
                        Value::Object(m)
                    })
                    .collect();
                writeln!(out, "{}", Value::Array(arr))
            }
        }
    }
}
