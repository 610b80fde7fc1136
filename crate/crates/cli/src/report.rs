use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_BUDGET: i32 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },

    #[error("{path}: {source}")]
    Parse { path: String, source: serde_json::Error },

    #[error(transparent)]
    Core(#[from] ppadforge::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } => EXIT_INPUT,
            CliError::Core(e) => match e {
                ppadforge::Error::Budget { .. } => EXIT_BUDGET,
                ppadforge::Error::Internal(_) => EXIT_NEGATIVE,
                _ => EXIT_INPUT,
            },
        }
    }

    pub fn verdict(&self) -> &'static str {
        match self {
            CliError::Core(ppadforge::Error::Budget { .. }) => "budget_refusal",
            CliError::Core(ppadforge::Error::Internal(_)) => "internal_error",
            _ => "input_error",
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Result of one subcommand before it becomes a report.
pub struct Outcome {
    pub verdict: String,
    pub exit_code: i32,
    pub result: Value,
}

impl Outcome {
    pub fn new(verdict: &str, exit_code: i32, result: impl Serialize) -> Self {
        Outcome { verdict: verdict.to_string(), exit_code, result: to_value(result) }
    }

    /// Exit 0 with `yes`, exit 1 with `no`.
    pub fn check(ok: bool, yes: &str, no: &str, result: impl Serialize) -> Self {
        if ok {
            Outcome::new(yes, EXIT_OK, result)
        } else {
            Outcome::new(no, EXIT_NEGATIVE, result)
        }
    }
}

pub fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).expect("report values serialize")
}

#[derive(Serialize)]
struct FileDigest {
    path: String,
    sha256: String,
}

/// Collects everything a report needs besides the outcome.
pub struct Ctx {
    command: Vec<String>,
    seed: u64,
    inputs: BTreeMap<String, FileDigest>,
    outputs: BTreeMap<String, FileDigest>,
    params: BTreeMap<String, Value>,
    diagnostics: Vec<String>,
}

fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

impl Ctx {
    pub fn new(command: Vec<String>, seed: u64) -> Self {
        Ctx {
            command,
            seed,
            inputs: BTreeMap::new(),
            outputs: BTreeMap::new(),
            params: BTreeMap::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn param(&mut self, key: &str, v: impl Serialize) {
        self.params.insert(key.to_string(), to_value(v));
    }

    pub fn note(&mut self, msg: impl Into<String>) {
        self.diagnostics.push(msg.into());
    }

    pub fn read_bytes(&mut self, role: &str, path: &Path) -> CliResult<Vec<u8>> {
        let bytes = fs::read(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.inputs
            .insert(role.to_string(), FileDigest { path: path.display().to_string(), sha256: sha256_hex(&bytes) });
        Ok(bytes)
    }

    pub fn read_json<T: DeserializeOwned>(&mut self, role: &str, path: &Path) -> CliResult<T> {
        let bytes = self.read_bytes(role, path)?;
        serde_json::from_slice(&bytes).map_err(|source| CliError::Parse { path: path.display().to_string(), source })
    }

    pub fn write_json(&mut self, role: &str, path: &Path, v: impl Serialize) -> CliResult<()> {
        let text = render(&to_value(v));
        fs::write(path, &text).map_err(|source| CliError::Io { path: path.display().to_string(), source })?;
        self.outputs
            .insert(role.to_string(), FileDigest { path: path.display().to_string(), sha256: sha256_hex(text.as_bytes()) });
        Ok(())
    }

    pub fn finish(self, outcome: Outcome) -> Value {
        json!({
            "command": self.command,
            "seed": self.seed,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "params": self.params,
            "verdict": outcome.verdict,
            "exit_code": outcome.exit_code,
            "result": outcome.result,
            "diagnostics": self.diagnostics,
        })
    }
}

/// Pretty JSON with a trailing newline; maps are already key-sorted.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("values serialize");
    s.push('\n');
    s
}

/// `game.json` → `game.<tag>.json`.
pub fn sidecar(out: &Path, tag: &str) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    out.with_file_name(format!("{stem}.{tag}.json"))
}
