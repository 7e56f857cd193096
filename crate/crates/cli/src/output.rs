use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::CliError;

pub const OUT_DIR_ENV: &str = "EXTROPY_OUT_DIR";

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

/// Reads an input file and records its digest.
pub fn read_input(path: &Path) -> Result<(Vec<u8>, InputDigest), CliError> {
    let bytes = fs::read(path).map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    let sha256 = Sha256::digest(&bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect();
    let digest = InputDigest {
        path: path.display().to_string(),
        sha256,
    };
    Ok((bytes, digest))
}

/// Provenance block embedded in every output.
#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub config: Value,
    pub inputs: Vec<InputDigest>,
}

impl Metadata {
    pub fn new(command: &'static str, config: Value, inputs: Vec<InputDigest>) -> Self {
        Metadata {
            tool: env!("CARGO_BIN_NAME"),
            version: env!("CARGO_PKG_VERSION"),
            command,
            config,
            inputs,
        }
    }

    fn csv_header(&self) -> String {
        let mut s = format!("# {} {} {}\n", self.tool, self.version, self.command);
        s += &format!("# config: {}\n", self.config);
        if self.inputs.is_empty() {
            s += "# input: none\n";
        }
        for i in &self.inputs {
            s += &format!("# input: {} sha256={}\n", i.path, i.sha256);
        }
        s
    }
}

/// A CSV table rendered with a metadata preamble.
pub fn render_csv(meta: &Metadata, header: &[&str], rows: &[Vec<String>]) -> String {
    let mut s = meta.csv_header();
    s += &header.join(",");
    s.push('\n');
    for r in rows {
        s += &r.join(",");
        s.push('\n');
    }
    s
}

/// A JSON document whose first field is the metadata block.
pub fn render_json(meta: &Metadata, body: impl Serialize) -> Result<String, CliError> {
    let mut doc = serde_json::Map::new();
    doc.insert(
        "metadata".into(),
        serde_json::to_value(meta).map_err(internal)?,
    );
    match serde_json::to_value(body).map_err(internal)? {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("result".into(), other);
        }
    }
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).map_err(internal)?;
    s.push('\n');
    Ok(s)
}

fn internal(e: serde_json::Error) -> CliError {
    CliError::Data(format!("serialization failed: {e}"))
}

/// Six-decimal table cell.
pub fn fixed(x: f64) -> String {
    format!("{x:.6}")
}

/// JSON number for finite values, `"inf"`/`"-inf"`/`"nan"` otherwise.
pub fn json_real(x: f64) -> Value {
    if x.is_finite() {
        Value::from(x)
    } else if x.is_nan() {
        Value::from("nan")
    } else if x > 0.0 {
        Value::from("inf")
    } else {
        Value::from("-inf")
    }
}

/// Where a document goes: an explicit path, the default directory from the
/// environment, or stdout.
pub fn destination(explicit: Option<&Path>, default_name: &str) -> Option<PathBuf> {
    if let Some(p) = explicit {
        return Some(p.to_path_buf());
    }
    std::env::var_os(OUT_DIR_ENV)
        .filter(|d| !d.is_empty())
        .map(|d| PathBuf::from(d).join(default_name))
}

/// Documents produced by one command, written together at the end.
#[derive(Default)]
pub struct Outputs {
    docs: Vec<(Option<PathBuf>, String)>,
}

impl Outputs {
    pub fn push(&mut self, path: Option<PathBuf>, content: String) {
        self.docs.push((path, content));
    }

    /// Writes every document; if any write fails the files already written
    /// are removed again.
    pub fn commit(self) -> Result<(), CliError> {
        let mut written: Vec<PathBuf> = Vec::new();
        let mut stdout = String::new();
        for (path, content) in self.docs {
            let Some(path) = path else {
                stdout += &content;
                continue;
            };
            let result = path
                .parent()
                .filter(|p| !p.as_os_str().is_empty())
                .map_or(Ok(()), fs::create_dir_all)
                .and_then(|()| fs::write(&path, content));
            match result {
                Ok(()) => written.push(path),
                Err(e) => {
                    let _ = fs::remove_file(&path);
                    for p in &written {
                        let _ = fs::remove_file(p);
                    }
                    return Err(CliError::Data(format!("{}: {e}", path.display())));
                }
            }
        }
        if !stdout.is_empty() {
            std::io::stdout()
                .lock()
                .write_all(stdout.as_bytes())
                .map_err(|e| CliError::Data(format!("stdout: {e}")))?;
        }
        Ok(())
    }
}
