use serde_json::{json, Value};
use std::io::Write;
use std::path::{Path, PathBuf};
use thiserror::Error;
use tropma_core::linalg::{Scalar, Vector};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Core(#[from] tropma_core::Error),
    #[error("cannot read {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("cannot write {path}: {message}")]
    Write { path: PathBuf, message: String },
    #[error("malformed JSON in {path}: {message}")]
    Json { path: PathBuf, message: String },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_algorithmic() => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self {
            CliError::Core(e) => e.kind(),
            CliError::Read { .. } => "read",
            CliError::Write { .. } => "write",
            CliError::Json { .. } => "malformed_json",
            CliError::Usage(_) => "usage",
        };
        json!({ "error": { "kind": kind, "message": self.to_string() } })
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Read {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    serde_json::from_str(&text).map_err(|e| CliError::Json {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Writes through a temporary file in the target directory, then renames.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> CliResult<()> {
    let err = |e: std::io::Error| CliError::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    };
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(err)?;
    tmp.write_all(bytes).map_err(err)?;
    tmp.persist(path).map_err(|e| err(e.error))?;
    Ok(())
}

/// Pretty JSON to `out`, or to stdout.
pub fn emit(out: Option<&Path>, v: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).expect("serializable");
    text.push('\n');
    emit_bytes(out, text.as_bytes())
}

pub fn emit_bytes(out: Option<&Path>, bytes: &[u8]) -> CliResult<()> {
    match out {
        Some(p) => write_atomic(p, bytes),
        None => {
            std::io::stdout()
                .write_all(bytes)
                .map_err(|e| CliError::Write {
                    path: PathBuf::from("<stdout>"),
                    message: e.to_string(),
                })
        }
    }
}

pub fn parse_scalar(s: &str) -> CliResult<Scalar> {
    Ok(tropma_core::json::parse_rational(&Value::String(s.to_string()))?)
}

/// Comma-separated rationals.
pub fn parse_point(s: &str) -> CliResult<Vector> {
    s.split(',').map(|t| parse_scalar(t.trim())).collect()
}
