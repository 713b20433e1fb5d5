//! Versioned JSON record of a `verify-all` run.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use kfib_balance::search::SolutionRecord;
use kfib_balance::Equation;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const SCHEMA: &str = "kfib-balance/manifest";
pub const VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Paper,
    Computed,
}

/// A number kept as its decimal string, tagged with where it came from.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Number {
    pub value: String,
    pub provenance: Provenance,
}

impl Number {
    pub fn paper(v: impl ToString) -> Self {
        Number {
            value: v.to_string(),
            provenance: Provenance::Paper,
        }
    }

    pub fn computed(v: impl ToString) -> Self {
        Number {
            value: v.to_string(),
            provenance: Provenance::Computed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
    /// Recorded for audit, not compared.
    Info,
    /// Not reached because an earlier stage aborted.
    NotRun,
}

impl Status {
    pub fn label(self) -> &'static str {
        match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIPPED",
            Status::Info => "INFO",
            Status::NotRun => "NOT RUN",
        }
    }

    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Status::Pass
        } else {
            Status::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub key: String,
    pub stage: String,
    pub label: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub paper: Option<Number>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub computed: Option<Number>,
    pub tolerance: String,
    pub status: Status,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub stage: String,
    pub instance: String,
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StageRecord {
    pub name: String,
    pub status: Status,
    pub summary: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<FailureRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunSettings {
    pub smoke: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k_range: Option<String>,
    pub working_bits: u32,
    pub max_bits: u32,
    pub equations: Vec<Equation>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum Verdict {
    Pass,
    Fail,
}

/// Everything that may differ between two identical runs.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub started: String,
    pub finished: String,
    pub elapsed_seconds: f64,
    pub stage_seconds: BTreeMap<String, f64>,
    pub host: String,
    pub jobs: usize,
    pub phi_cache_reused: usize,
    pub tool_version: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema: String,
    pub version: u32,
    pub config: RunSettings,
    pub stages: Vec<StageRecord>,
    pub entries: Vec<Entry>,
    pub solutions: Vec<SolutionRecord>,
    pub verdict: Verdict,
    pub meta: Meta,
}

impl Manifest {
    pub fn new(config: RunSettings) -> Self {
        Manifest {
            schema: SCHEMA.to_string(),
            version: VERSION,
            config,
            stages: Vec::new(),
            entries: Vec::new(),
            solutions: Vec::new(),
            verdict: Verdict::Fail,
            meta: Meta::default(),
        }
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.name == name)
    }

    pub fn entry(&self, key: &str) -> Option<&Entry> {
        self.entries.iter().find(|e| e.key == key)
    }

    pub fn failures(&self) -> impl Iterator<Item = &FailureRecord> {
        self.stages.iter().flat_map(|s| s.failures.iter())
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }

    /// JSON without the `meta` block; equal for two runs with the same
    /// configuration.
    pub fn deterministic_json(&self) -> String {
        let mut v = serde_json::to_value(self).expect("manifest serializes");
        if let Some(obj) = v.as_object_mut() {
            obj.remove("meta");
        }
        serde_json::to_string_pretty(&v).expect("value serializes")
    }

    /// Write through a temporary file in the same directory.
    pub fn write(&self, path: &Path) -> CliResult<()> {
        let dir = match path.parent() {
            Some(d) if !d.as_os_str().is_empty() => d,
            _ => Path::new("."),
        };
        fs::create_dir_all(dir).map_err(|e| CliError::file(dir, e))?;
        let tmp = dir.join(format!(
            ".{}.tmp{}",
            path.file_name()
                .and_then(|n| n.to_str())
                .unwrap_or("manifest"),
            std::process::id()
        ));
        fs::write(&tmp, self.to_json()).map_err(|e| CliError::file(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| CliError::file(path, e))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::file(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        if text.trim().is_empty() {
            return Err(CliError::SchemaMismatch("manifest is empty".into()));
        }
        let v: serde_json::Value = serde_json::from_str(text)
            .map_err(|e| CliError::SchemaMismatch(format!("not JSON: {e}")))?;
        let Some(obj) = v.as_object() else {
            return Err(CliError::SchemaMismatch("expected a JSON object".into()));
        };
        if obj.is_empty() {
            return Err(CliError::SchemaMismatch("manifest is empty".into()));
        }
        match obj.get("schema").and_then(|s| s.as_str()) {
            Some(SCHEMA) => {}
            other => {
                return Err(CliError::SchemaMismatch(format!(
                    "schema {other:?}, expected {SCHEMA:?}"
                )))
            }
        }
        match obj.get("version").and_then(|s| s.as_u64()) {
            Some(v) if v == u64::from(VERSION) => {}
            other => {
                return Err(CliError::SchemaMismatch(format!(
                    "version {other:?}, expected {VERSION}"
                )))
            }
        }
        let m: Manifest =
            serde_json::from_value(v).map_err(|e| CliError::SchemaMismatch(e.to_string()))?;
        if m.stages.is_empty() {
            return Err(CliError::SchemaMismatch("manifest has no stages".into()));
        }
        Ok(m)
    }
}
