//! Rendering of result tables as CSV or JSON.
//!
//! Both formats carry the resolved [`RunConfig`]: CSV files start with a
//! `# config: {...}` line, JSON files are `{"config": ..., "results": [...]}`
//! with one object per CSV row.

use std::fs;
use std::path::Path;

use serde_json::{Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

/// A column-oriented table of JSON-compatible cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Non-finite numbers have no JSON form and become null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub fn opt_num(x: Option<f64>) -> Value {
    x.map_or(Value::Null, num)
}

pub fn text(s: impl Into<String>) -> Value {
    Value::String(s.into())
}

fn csv_cell(v: &Value) -> String {
    match v {
        Value::Null => String::new(),
        Value::String(s) => s.clone(),
        // shortest round-trip form, same digits as the JSON output
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => i.to_string(),
            (_, Some(u), _) => u.to_string(),
            (_, _, Some(f)) => f.to_string(),
            _ => n.to_string(),
        },
        other => other.to_string(),
    }
}

/// One output file, not yet written.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub file_name: String,
    pub contents: String,
}

impl Artifact {
    pub fn render(config: &RunConfig, stem: &str, table: &Table) -> Result<Artifact, CliError> {
        let contents = match config.format {
            Format::Csv => render_csv(config, table)?,
            Format::Json => render_json(config, table)?,
        };
        Ok(Artifact {
            file_name: format!("{stem}.{}", config.format.extension()),
            contents,
        })
    }
}

fn render_csv(config: &RunConfig, table: &Table) -> Result<String, CliError> {
    let mut out = format!("# config: {}\n", serde_json::to_string(config)?);
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer.write_record(&table.columns)?;
    for row in &table.rows {
        writer.write_record(row.iter().map(csv_cell))?;
    }
    let bytes = writer.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    out.push_str(&String::from_utf8(bytes).expect("csv output is utf-8"));
    Ok(out)
}

fn render_json(config: &RunConfig, table: &Table) -> Result<String, CliError> {
    let results: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().cloned()).collect();
            Value::Object(obj)
        })
        .collect();
    let doc = serde_json::json!({ "config": config, "results": results });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    Ok(s)
}

/// Writes artifacts into `dir` in order, creating it if needed.
pub fn write_artifacts(dir: &Path, artifacts: &[Artifact]) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    for a in artifacts {
        fs::write(dir.join(&a.file_name), &a.contents)?;
    }
    Ok(())
}
