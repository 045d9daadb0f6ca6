use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use alw_core::linalg::SymMatrix;
use serde::Serialize;
use serde_json::Value;

use crate::inputs::{InputError, Result};

/// Everything needed to reproduce a report.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: BTreeMap<String, Value>,
    pub seed: u64,
    pub tool_version: String,
    pub timestamp: String,
}

impl RunManifest {
    pub fn new(command: impl Into<String>, seed: u64) -> Self {
        RunManifest {
            command: command.into(),
            inputs: BTreeMap::new(),
            seed,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true),
        }
    }

    pub fn input(&mut self, key: &str, value: impl Serialize) -> &mut Self {
        let v = serde_json::to_value(value).expect("inputs serialize to JSON");
        self.inputs.insert(key.to_string(), v);
        self
    }
}

#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub manifest: &'a RunManifest,
    #[serde(flatten)]
    pub body: &'a T,
}

pub fn to_json<T: Serialize>(manifest: &RunManifest, body: &T) -> Result<String> {
    let mut text = alw_core::json::to_string(&Report { manifest, body })?;
    text.push('\n');
    Ok(text)
}

pub fn number(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        String::new()
    }
}

/// Quotes a CSV field when needed.
pub fn field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// The manifest as a leading `#` comment line.
pub fn csv_header(manifest: &RunManifest) -> Result<String> {
    let compact = serde_json::to_string(manifest).map_err(|e| InputError(e.to_string()))?;
    Ok(format!("# manifest: {compact}\n"))
}

pub fn csv_matrix(m: &SymMatrix) -> String {
    let mut s = String::new();
    for i in 0..m.dim() {
        let row: Vec<String> = m.row(i).iter().map(|&v| number(v)).collect();
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Writes to `out`, or stdout when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| InputError(format!("--out {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| InputError(format!("stdout: {e}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn manifest_comes_first_and_round_trips() {
        let mut m = RunManifest::new("build loewner", 3);
        m.input("x", 0.1_f64);
        let text = to_json(&m, &json!({"value": 1.0 / 3.0})).unwrap();
        assert!(text.trim_start().starts_with("{\n  \"manifest\""));
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["value"].as_f64().unwrap(), 1.0 / 3.0);
        assert_eq!(v["manifest"]["inputs"]["x"].as_f64().unwrap(), 0.1);
        assert_eq!(v["manifest"]["seed"], 3);
    }

    #[test]
    fn csv_helpers() {
        assert_eq!(field("a,b"), "\"a,b\"");
        assert_eq!(field("plain"), "plain");
        assert_eq!(number(0.5), "5.0000000000000000e-1");
        assert_eq!(number(f64::NAN), "");
        assert_eq!(csv_matrix(&SymMatrix::identity(2)).lines().count(), 2);
    }
}
