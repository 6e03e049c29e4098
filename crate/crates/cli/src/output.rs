use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use sl2x_core::Error;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Failure classes, each with its own exit code.
#[derive(Debug)]
pub enum Failure {
    Config(String),
    Analysis(String),
    Cap(String),
}

impl Failure {
    pub fn exit_code(&self) -> ExitCode {
        ExitCode::from(match self {
            Failure::Config(_) => 2,
            Failure::Analysis(_) => 3,
            Failure::Cap(_) => 4,
        })
    }

    pub fn config(msg: impl Into<String>) -> Self {
        Failure::Config(msg.into())
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::Config(m) => write!(f, "configuration error: {m}"),
            Failure::Analysis(m) => write!(f, "analysis failed: {m}"),
            Failure::Cap(m) => write!(f, "cap exceeded: {m}"),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::CapExceeded { .. } | Error::TooLargeForExactCheeger(_) | Error::TooLargeForDense(_) => Failure::Cap(msg),
            Error::Disconnected | Error::NoConvergence { .. } | Error::Residual { .. } => Failure::Analysis(msg),
            _ => Failure::Config(msg),
        }
    }
}

pub type CliResult<T> = Result<T, Failure>;

/// Hex SHA-256 of the canonical (key-sorted, compact) JSON of `config`.
pub fn config_hash(config: &Value) -> String {
    let canonical = serde_json::to_string(config).expect("JSON value serializes");
    Sha256::digest(canonical.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Result of one invocation, held in memory until everything succeeded.
pub struct Output {
    command: String,
    config: Value,
    hash: String,
    result: Value,
    files: Vec<(String, String)>,
    pub passed: bool,
    /// Print the JSON document when no output directory is given.
    pub print_json: bool,
}

impl Output {
    pub fn new<C: Serialize>(command: &str, config: &C) -> Self {
        let config = serde_json::to_value(config).expect("config serializes");
        let hash = config_hash(&config);
        Self { command: command.into(), config, hash, result: Value::Null, files: Vec::new(), passed: true, print_json: true }
    }

    pub fn result<T: Serialize>(&mut self, value: &T) {
        self.result = serde_json::to_value(value).expect("result serializes");
    }

    /// Adds a CSV file; `body` starts with its column header.
    pub fn csv(&mut self, name: &str, body: String) {
        let text = format!("# sl2x {VERSION} config-sha256={}\n{body}", self.hash);
        self.files.push((name.into(), text));
    }

    pub fn json(&self) -> String {
        let doc = json!({
            "tool": "sl2x",
            "version": VERSION,
            "command": self.command,
            "config_hash": self.hash,
            "config": self.config,
            "result": self.result,
        });
        serde_json::to_string_pretty(&doc).expect("JSON value serializes") + "\n"
    }

    /// Prints the JSON document, or writes `result.json` and every CSV into
    /// `dir`. Files are staged under temporary names and renamed at the end.
    pub fn emit(&self, dir: Option<&Path>) -> CliResult<()> {
        let Some(dir) = dir else {
            if self.print_json {
                print!("{}", self.json());
            }
            return Ok(());
        };
        let io = |e: std::io::Error, p: &Path| Failure::Analysis(format!("writing {}: {e}", p.display()));
        fs::create_dir_all(dir).map_err(|e| io(e, dir))?;
        let mut all = vec![("result.json".to_string(), self.json())];
        all.extend(self.files.iter().cloned());
        let mut staged: Vec<(PathBuf, PathBuf)> = Vec::new();
        for (name, text) in &all {
            let tmp = dir.join(format!(".{name}.partial"));
            if let Err(e) = fs::write(&tmp, text) {
                let _ = fs::remove_file(&tmp);
                for (t, _) in &staged {
                    let _ = fs::remove_file(t);
                }
                return Err(io(e, &tmp));
            }
            staged.push((tmp, dir.join(name)));
        }
        for (tmp, dst) in &staged {
            fs::rename(tmp, dst).map_err(|e| io(e, dst))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_ignores_key_order() {
        let a: Value = serde_json::from_str(r#"{"a":1,"b":[2,3]}"#).unwrap();
        let b: Value = serde_json::from_str(r#"{"b":[2,3],"a":1}"#).unwrap();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
    }

    #[test]
    fn error_classes() {
        assert!(matches!(Failure::from(Error::InvalidModulus(0)), Failure::Config(_)));
        assert!(matches!(Failure::from(Error::TooLargeForExactCheeger(30)), Failure::Cap(_)));
        assert!(matches!(Failure::from(Error::Disconnected), Failure::Analysis(_)));
    }

    #[test]
    fn csv_carries_header_line() {
        let mut o = Output::new("t", &json!({"x": 1}));
        o.csv("a.csv", "l,v\n1,2\n".into());
        assert!(o.files[0].1.starts_with(&format!("# sl2x {VERSION} config-sha256={}", o.hash)));
    }
}
