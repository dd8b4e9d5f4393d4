//! CSV and JSON rendering with atomic file writes.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use serde_json::{json, Map, Value};

use super::config::{ExperimentConfig, OutputFormat};
use super::figures::{Cell, Table};

/// Run metadata written ahead of the data.
#[derive(Debug, Clone)]
pub struct Metadata {
    pub entries: Vec<(String, String)>,
}

impl Metadata {
    pub fn new(config: &ExperimentConfig, wall_time_s: f64) -> Self {
        let mut entries = vec![
            ("program".to_string(), env!("CARGO_PKG_NAME").to_string()),
            ("version".to_string(), env!("CARGO_PKG_VERSION").to_string()),
        ];
        entries.extend(config.echo());
        entries.push(("wall_time_s".to_string(), format!("{wall_time_s:.3}")));
        Self { entries }
    }
}

fn cell_text(cell: &Cell) -> String {
    match cell {
        Cell::Int(v) => v.to_string(),
        Cell::Float(v) => v.to_string(),
        Cell::Missing => String::new(),
    }
}

/// `# key: value` preamble, a header row, then one line per row (LF endings).
/// Floats use the shortest representation that round-trips.
pub fn render_csv(table: &Table, meta: &Metadata) -> String {
    let mut out = String::new();
    for (k, v) in &meta.entries {
        let _ = writeln!(out, "# {k}: {v}");
    }
    out.push_str(&table.columns.join(","));
    out.push('\n');
    for row in &table.rows {
        let line: Vec<String> = row.iter().map(cell_text).collect();
        out.push_str(&line.join(","));
        out.push('\n');
    }
    out
}

/// Strips the `#` preamble, leaving the header and data rows.
pub fn csv_body(text: &str) -> String {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect()
}

pub fn render_json(table: &Table, meta: &Metadata) -> String {
    let metadata: Map<String, Value> = meta
        .entries
        .iter()
        .map(|(k, v)| (k.clone(), Value::String(v.clone())))
        .collect();
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            Value::Array(
                row.iter()
                    .map(|c| match c {
                        Cell::Int(v) => json!(v),
                        Cell::Float(v) => json!(v),
                        Cell::Missing => Value::Null,
                    })
                    .collect(),
            )
        })
        .collect();
    let doc = json!({
        "metadata": metadata,
        "columns": table.columns,
        "rows": rows,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("serializing a JSON value");
    text.push('\n');
    text
}

pub fn render(table: &Table, meta: &Metadata, format: OutputFormat) -> String {
    match format {
        OutputFormat::Csv => render_csv(table, meta),
        OutputFormat::Json => render_json(table, meta),
    }
}

/// Writes `contents` to a temporary sibling and renames it over `path`,
/// removing the temporary file if anything fails.
pub fn write_atomic(path: &Path, contents: &str) -> io::Result<()> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    let name = path
        .file_name()
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidInput, "output path has no file name"))?;
    let tmp = dir.join(format!(".{}.{}.tmp", name.to_string_lossy(), std::process::id()));
    let result = (|| {
        let mut file = fs::File::create(&tmp)?;
        file.write_all(contents.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, path)
    })();
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}
