use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::{Error, Result, FORMAT_VERSION};

/// Provenance recorded in every output: command, parameters and the name and
/// digest of each input. Paths are reduced to file names so that outputs do
/// not depend on where the inputs live.
#[derive(Debug, Clone)]
pub(super) struct Meta {
    command: String,
    params: BTreeMap<String, String>,
    inputs: BTreeMap<String, (String, String)>,
}

pub(super) fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

impl Meta {
    pub fn new(command: &str) -> Self {
        Meta {
            command: command.to_string(),
            params: BTreeMap::new(),
            inputs: BTreeMap::new(),
        }
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.params.insert(key.to_string(), value.to_string());
    }

    /// Reads an input file as UTF-8 and records its digest under `role`.
    pub fn read(&mut self, role: &str, path: &Path) -> Result<String> {
        let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
        let digest = hex::encode(Sha256::digest(&bytes));
        self.inputs.insert(role.to_string(), (file_name(path), digest));
        String::from_utf8(bytes).map_err(|_| Error::Format(format!("{} is not valid UTF-8", path.display())))
    }

    pub fn to_json(&self) -> Value {
        let inputs: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(role, (file, digest))| (role.clone(), json!({ "file": file, "sha256": digest })))
            .collect();
        json!({
            "tool": "act",
            "version": env!("CARGO_PKG_VERSION"),
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "params": self.params,
            "inputs": inputs,
        })
    }

    pub fn tsv_header(&self) -> String {
        let mut out = format!(
            "# tool=act\n# version={}\n# format_version={FORMAT_VERSION}\n# command={}\n",
            env!("CARGO_PKG_VERSION"),
            self.command
        );
        for (k, v) in &self.params {
            out.push_str(&format!("# param.{k}={v}\n"));
        }
        for (role, (file, digest)) in &self.inputs {
            out.push_str(&format!("# input.{role}={file} sha256={digest}\n"));
        }
        out
    }
}

pub(super) fn ensure_writable(path: &Path, overwrite: bool) -> Result<()> {
    if path.exists() && !overwrite {
        return Err(Error::Config(format!(
            "{} exists; pass --overwrite to replace it",
            path.display()
        )));
    }
    Ok(())
}

fn write(path: &Path, overwrite: bool, text: &str) -> Result<()> {
    ensure_writable(path, overwrite)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes a JSON object with the metadata under the top-level `meta` key.
pub(super) fn write_json(path: &Path, overwrite: bool, body: Value, meta: &Meta) -> Result<()> {
    let Value::Object(mut map) = body else {
        return Err(Error::Format("artifact body is not a JSON object".into()));
    };
    map.insert("meta".into(), meta.to_json());
    let mut text = serde_json::to_string_pretty(&Value::Object(map)).map_err(|e| Error::Format(e.to_string()))?;
    text.push('\n');
    write(path, overwrite, &text)
}

/// Writes a TSV body preceded by `# key=value` metadata lines.
pub(super) fn write_tsv(path: &Path, overwrite: bool, body: &str, meta: &Meta) -> Result<()> {
    write(path, overwrite, &(meta.tsv_header() + body))
}

/// Splits a JSON artifact into its body and its `meta` object.
pub(super) fn split_meta(text: &str, source: &Path) -> Result<(Value, Value)> {
    let value: Value = serde_json::from_str(text).map_err(|e| Error::Format(format!("{}: {e}", file_name(source))))?;
    let Value::Object(mut map) = value else {
        return Err(Error::Format(format!("{}: expected a JSON object", file_name(source))));
    };
    let meta = map.remove("meta").unwrap_or(Value::Null);
    Ok((Value::Object(map), meta))
}

pub(super) fn from_body<T: DeserializeOwned>(body: Value, source: &Path) -> Result<T> {
    serde_json::from_value(body).map_err(|e| Error::Format(format!("{}: {e}", file_name(source))))
}

/// A parameter recorded by an upstream command, if any.
pub(super) fn upstream_param(meta: &Value, key: &str) -> Option<String> {
    meta.get("params")?.get(key)?.as_str().map(str::to_string)
}
