//! Rendering of command results in the four output formats.

use std::collections::BTreeSet;
use std::fs::File;
use std::io::{self, Write};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Jsonl,
    Csv,
    Pretty,
}

/// A command result. `doc` is the whole report; `rows` are its records for
/// the line-oriented formats; `pretty` is the human-readable rendering.
pub struct Report {
    pub doc: Value,
    pub rows: Vec<Value>,
    pub pretty: String,
}

impl Report {
    /// Copies the header fields (`digest`, `cap`, ...) of `doc` into every
    /// row so each line stands on its own.
    pub fn stamp_rows(&mut self, keys: &[&str]) {
        for row in &mut self.rows {
            if let Value::Object(map) = row {
                for k in keys {
                    if let Some(v) = self.doc.get(*k) {
                        map.entry(k.to_string()).or_insert_with(|| v.clone());
                    }
                }
            }
        }
    }

    pub fn render(&self, format: Format) -> Result<String> {
        Ok(match format {
            Format::Json => format!("{}\n", serde_json::to_string_pretty(&self.doc)?),
            Format::Jsonl => {
                let lines: Vec<&Value> = if self.rows.is_empty() { vec![&self.doc] } else { self.rows.iter().collect() };
                lines.iter().map(|v| format!("{v}\n")).collect()
            }
            Format::Csv => csv_of(if self.rows.is_empty() { std::slice::from_ref(&self.doc) } else { &self.rows })?,
            Format::Pretty => self.pretty.clone(),
        })
    }
}

fn cell(v: Option<&Value>) -> String {
    match v {
        None | Some(Value::Null) => String::new(),
        Some(Value::String(s)) => s.clone(),
        Some(other) => other.to_string(),
    }
}

fn csv_of(rows: &[Value]) -> Result<String> {
    let empty = Map::new();
    let objects: Vec<&Map<String, Value>> = rows.iter().map(|r| r.as_object().unwrap_or(&empty)).collect();
    let columns: BTreeSet<&String> = objects.iter().flat_map(|o| o.keys()).collect();
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(&columns)?;
    for o in objects {
        w.write_record(columns.iter().map(|c| cell(o.get(*c))))?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

/// Writes to standard output for `-`, to the named file otherwise.
pub fn emit(text: &str, out: &str) -> Result<()> {
    if out == "-" {
        let mut stdout = io::stdout().lock();
        stdout.write_all(text.as_bytes())?;
        stdout.flush()?;
    } else {
        let mut f = File::create(out).with_context(|| format!("cannot create {out}"))?;
        f.write_all(text.as_bytes())?;
    }
    Ok(())
}

/// `key: value` lines.
pub fn lines(pairs: &[(&str, String)]) -> String {
    pairs.iter().map(|(k, v)| format!("{k}: {v}\n")).collect()
}
