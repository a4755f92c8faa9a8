//! Artifact writers. Every file starts with the same provenance block.

use std::io;
use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::config::{Formats, RunConfig};

pub const SCHEMA: u32 = 1;
pub const TOOL: &str = "shrinker";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Shortest round-trip text for `x`; scientific form only for very small or large magnitudes.
pub fn num(x: f64) -> String {
    let a = x.abs();
    if x == 0.0 || (1e-5..1e16).contains(&a) || !x.is_finite() {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

pub fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

pub fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    /// Two-column `key,value` table.
    pub fn key_value(pairs: impl IntoIterator<Item = (String, String)>) -> Self {
        let mut t = Self::new(["key", "value"]);
        for (k, v) in pairs {
            t.push(vec![k, v]);
        }
        t
    }
}

/// Provenance: tool, version, schema and every configured key.
#[derive(Debug, Clone)]
pub struct Provenance {
    lines: Vec<String>,
    config: Value,
}

impl Provenance {
    pub fn new(config: &RunConfig) -> Self {
        let mut lines = vec![
            format!("tool={TOOL}"),
            format!("version={VERSION}"),
            format!("schema={SCHEMA}"),
        ];
        let mut map = serde_json::Map::new();
        for (k, v) in config.params.set_keys() {
            let text = match &v {
                Value::String(s) => s.clone(),
                other => other.to_string(),
            };
            lines.push(format!("{k}={text}"));
            map.insert(k, v);
        }
        Self {
            lines,
            config: Value::Object(map),
        }
    }
}

pub struct Writer {
    dir: PathBuf,
    formats: Formats,
    provenance: Provenance,
    pub written: Vec<PathBuf>,
}

impl Writer {
    pub fn new(dir: &Path, formats: Formats, provenance: Provenance) -> io::Result<Self> {
        std::fs::create_dir_all(dir)?;
        Ok(Self {
            dir: dir.to_path_buf(),
            formats,
            provenance,
            written: Vec::new(),
        })
    }

    fn put(&mut self, name: &str, bytes: &[u8]) -> io::Result<()> {
        let path = self.dir.join(name);
        std::fs::write(&path, bytes)?;
        self.written.push(path);
        Ok(())
    }

    pub fn csv(&mut self, name: &str, table: &Table) -> io::Result<()> {
        if !self.formats.csv {
            return Ok(());
        }
        let mut out = Vec::new();
        for line in &self.provenance.lines {
            out.extend_from_slice(format!("# {line}\n").as_bytes());
        }
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&table.header)?;
            for row in &table.rows {
                w.write_record(row)?;
            }
            w.flush()?;
        }
        self.put(name, &out)
    }

    pub fn json(&mut self, name: &str, command: &str, report: Value) -> io::Result<()> {
        if !self.formats.json {
            return Ok(());
        }
        let doc = json!({
            "tool": TOOL,
            "version": VERSION,
            "schema": SCHEMA,
            "command": command,
            "config": self.provenance.config,
            "report": report,
        });
        let mut text = serde_json::to_string_pretty(&doc).map_err(io::Error::other)?;
        text.push('\n');
        self.put(name, text.as_bytes())
    }

    pub fn svg(&mut self, name: &str, body: &str) -> io::Result<()> {
        if !self.formats.svg {
            return Ok(());
        }
        let comment: String = self
            .provenance
            .lines
            .iter()
            .map(|l| format!("  {}\n", l.replace("--", "- -")))
            .collect();
        let text = body.replacen("<svg ", &format!("<!--\n{comment}-->\n<svg "), 1);
        self.put(name, text.as_bytes())
    }
}
