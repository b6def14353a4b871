//! Provenance headers and file writers.

use std::path::{Path, PathBuf};

use serde_json::{json, Value};

use crate::CliError;

pub struct Context {
    pub seed: u64,
    pub out_dir: PathBuf,
    pub command: &'static str,
}

impl Context {
    pub fn meta(&self, params: &Value) -> Value {
        json!({
            "tool": "fracperc",
            "version": fracperc::VERSION,
            "command": self.command,
            "seed": self.seed,
            "params": params,
        })
    }

    /// Provenance as comment lines (without the leading `#`).
    pub fn provenance(&self, params: &Value) -> Vec<String> {
        vec![
            format!("fracperc {}", fracperc::VERSION),
            format!("command {}", self.command),
            format!("seed {}", self.seed),
            format!("params {params}"),
        ]
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out_dir.join(name)
    }

    pub fn write_bytes(&self, name: &str, bytes: &[u8]) -> Result<PathBuf, CliError> {
        let path = self.path(name);
        std::fs::write(&path, bytes).map_err(|e| CliError::io(&format!("writing {}", path.display()), e))?;
        Ok(path)
    }

    /// CSV preceded by `#` provenance lines.
    pub fn write_csv(&self, name: &str, params: &Value, body: &str) -> Result<PathBuf, CliError> {
        let mut text = String::new();
        for line in self.provenance(params) {
            text.push_str("# ");
            text.push_str(&line);
            text.push('\n');
        }
        text.push_str(body);
        self.write_bytes(name, text.as_bytes())
    }

    /// JSON object `{ "meta": …, …fields }`.
    pub fn write_json(&self, name: &str, params: &Value, mut body: Value) -> Result<PathBuf, CliError> {
        if let Value::Object(map) = &mut body {
            map.insert("meta".into(), self.meta(params));
        }
        let mut text = serde_json::to_string_pretty(&body).expect("serializable");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }
}

pub fn display(path: &Path) -> String {
    path.display().to_string()
}
