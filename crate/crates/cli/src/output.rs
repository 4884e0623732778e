//! Artifacts and their CSV, JSON and Markdown renderings.

use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::{Map, Value};
use tempfile::NamedTempFile;

use expsamp::analysis::{BoundCheck, Verdict};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

/// Floats with 17 significant digits; `None` and NaN become empty cells.
pub fn cell(value: Option<f64>) -> String {
    match value {
        Some(v) if !v.is_nan() => format!("{v:.16e}"),
        _ => String::new(),
    }
}

#[derive(Debug, Default)]
pub struct Table {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
    /// Written as `#` lines after the config line.
    pub comments: Vec<String>,
}

impl Table {
    pub fn new(headers: &[&'static str]) -> Self {
        Self {
            headers: headers.to_vec(),
            ..Self::default()
        }
    }

    pub fn of_checks(checks: &[BoundCheck]) -> Self {
        let mut table = Self::new(&["bound", "verdict", "lhs", "rhs", "slack", "witness", "note"]);
        for c in checks {
            table.rows.push(vec![
                c.bound_name.clone(),
                verdict_label(c.verdict).to_string(),
                cell(Some(c.lhs)),
                cell(Some(c.rhs)),
                cell(Some(c.slack)),
                cell(c.witness),
                c.note.clone(),
            ]);
        }
        table
    }
}

pub fn verdict_label(v: Verdict) -> &'static str {
    match v {
        Verdict::Holds => "holds",
        Verdict::Consistent => "consistent",
        Verdict::Violated => "violated",
        Verdict::HypothesisNotMet => "hypothesis-not-met",
    }
}

/// Result of one command before rendering.
pub struct Artifact {
    pub title: String,
    /// JSON payload fields, placed after `config`.
    pub payload: Map<String, Value>,
    pub table: Table,
    pub checks: Vec<BoundCheck>,
    /// Summary lines printed before the per-check lines.
    pub lines: Vec<String>,
    /// Summary lines printed after the per-check lines.
    pub footer: Vec<String>,
}

impl Artifact {
    pub fn render(&self, config: &RunConfig) -> Result<Vec<u8>, CliError> {
        let embedded = config.embedded();
        match config.format() {
            Format::Json => {
                let mut root = Map::new();
                root.insert("config".into(), serde_json::to_value(&embedded)?);
                root.extend(self.payload.clone());
                let mut bytes = serde_json::to_vec_pretty(&Value::Object(root))?;
                bytes.push(b'\n');
                Ok(bytes)
            }
            Format::Csv => {
                let mut out = Vec::new();
                writeln!(out, "# config: {}", serde_json::to_string(&embedded)?).expect("write to memory");
                for c in &self.table.comments {
                    writeln!(out, "# {c}").expect("write to memory");
                }
                let mut writer = csv::Writer::from_writer(out);
                writer.write_record(&self.table.headers)?;
                for row in &self.table.rows {
                    writer.write_record(row)?;
                }
                writer.into_inner().map_err(|e| CliError::io("csv buffer", e.into_error()))
            }
            Format::Md => Ok(self.markdown(&embedded)?.into_bytes()),
        }
    }

    fn markdown(&self, config: &RunConfig) -> Result<String, CliError> {
        let mut s = format!("# {}\n\n", self.title);
        s.push_str(&format!("```json\n{}\n```\n\n", serde_json::to_string_pretty(config)?));
        if !self.table.rows.is_empty() {
            s.push_str(&markdown_table(&self.table.headers, &self.table.rows));
            s.push('\n');
        }
        for c in &self.table.comments {
            s.push_str(&format!("- {c}\n"));
        }
        if !self.checks.is_empty() && self.table.headers.first() != Some(&"bound") {
            let checks = Table::of_checks(&self.checks);
            s.push_str("\n## Checks\n\n");
            s.push_str(&markdown_table(&checks.headers, &checks.rows));
        }
        Ok(s)
    }
}

fn markdown_table(headers: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = format!("| {} |\n", headers.join(" | "));
    s.push_str(&format!("|{}\n", "---|".repeat(headers.len())));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|c| c.replace('|', "\\|")).collect();
        s.push_str(&format!("| {} |\n", cells.join(" | ")));
    }
    s
}

pub fn summary_line(check: &BoundCheck) -> String {
    let mut line = format!("{:<18} {}", verdict_label(check.verdict), check.bound_name);
    if check.verdict != Verdict::HypothesisNotMet {
        line.push_str(&format!(": lhs {:.6e} rhs {:.6e}", check.lhs, check.rhs));
    }
    if !check.note.is_empty() && check.verdict == Verdict::HypothesisNotMet {
        line.push_str(&format!(" ({})", check.note));
    }
    line
}

/// Output path: `--out` (relative paths land in `out_dir` when given), or a
/// generated name inside `out_dir`, or `None` for standard output.
pub fn target_path(config: &RunConfig, out_dir: Option<&Path>) -> Option<PathBuf> {
    match (&config.output, out_dir) {
        (Some(p), Some(dir)) if p.is_relative() => Some(dir.join(p)),
        (Some(p), _) => Some(p.clone()),
        (None, Some(dir)) => Some(dir.join(format!(
            "{}-{}-{}.{}",
            config.command.name(),
            config.kernel,
            config.function,
            config.format().extension()
        ))),
        (None, None) => None,
    }
}

/// Write through a temporary file in the target directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

pub fn payload(fields: Vec<(&str, Value)>) -> Map<String, Value> {
    fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect()
}
