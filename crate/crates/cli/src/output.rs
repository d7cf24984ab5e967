//! Versioned JSON and CSV output with an embedded manifest.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

pub const SCHEMA: &str = "spart-lab/1";

/// Everything needed to reproduce a run: the command, its full parameter
/// record, the library version and hashes of the input files.
#[derive(Debug, Clone, Serialize)]
pub struct Manifest {
    pub command: String,
    pub params: Value,
    pub version: &'static str,
    pub inputs: BTreeMap<String, String>,
}

impl Manifest {
    pub fn new(command: &str, params: impl Serialize) -> Self {
        Self {
            command: command.to_string(),
            params: serde_json::to_value(params).expect("parameters serialize"),
            version: env!("CARGO_PKG_VERSION"),
            inputs: BTreeMap::new(),
        }
    }

    pub fn record_input(&mut self, path: &Path, bytes: &[u8]) {
        self.inputs.insert(path.display().to_string(), hex(&Sha256::digest(bytes)));
    }

    pub fn hash(&self) -> String {
        hex(&Sha256::digest(serde_json::to_vec(self).expect("manifest serializes")))
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// A table for CSV output; cells are already formatted.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

pub struct Report {
    pub result: Value,
    pub table: Option<Table>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

pub fn render(manifest: &Manifest, report: &Report, format: Format) -> Result<String, String> {
    match format {
        Format::Json => {
            let doc = json!({
                "schema": SCHEMA,
                "manifest": manifest,
                "manifest_sha256": manifest.hash(),
                "result": report.result,
            });
            Ok(serde_json::to_string_pretty(&doc).expect("report serializes") + "\n")
        }
        Format::Csv => {
            let table = report.table.as_ref().ok_or("this command has no CSV form; use --format json")?;
            let mut out = format!(
                "# schema={SCHEMA} manifest_sha256={}\n# manifest={}\n",
                manifest.hash(),
                serde_json::to_string(manifest).expect("manifest serializes")
            );
            out.push_str(&table.header.join(","));
            out.push('\n');
            for row in &table.rows {
                out.push_str(&row.iter().map(|c| csv_cell(c)).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            Ok(out)
        }
    }
}

fn csv_cell(c: &str) -> String {
    if c.contains([',', '"', '\n']) {
        format!("\"{}\"", c.replace('"', "\"\""))
    } else {
        c.to_string()
    }
}

pub fn emit(text: &str, out: Option<&Path>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().lock().write_all(text.as_bytes()),
    }
}
