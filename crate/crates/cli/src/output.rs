//! Report envelopes and atomic file output.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::config::RunConfig;
use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "fdqm";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Run-dependent facts, kept apart so the rest of a report is reproducible.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Provenance {
    pub tool: String,
    pub version: String,
    pub started_unix: u64,
    pub elapsed_seconds: f64,
}

impl Provenance {
    pub fn now(started: SystemTime) -> Self {
        Self {
            tool: TOOL.into(),
            version: VERSION.into(),
            started_unix: started
                .duration_since(UNIX_EPOCH)
                .map_or(0, |d| d.as_secs()),
            elapsed_seconds: started.elapsed().map_or(0.0, |d| d.as_secs_f64()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Report<T> {
    pub schema_version: u32,
    pub command: String,
    pub config: RunConfig,
    /// Tolerances and thresholds the results are judged against.
    pub thresholds: Value,
    pub results: T,
    pub provenance: Provenance,
}

const REPORT_KEYS: [&str; 6] = [
    "schema_version",
    "command",
    "config",
    "thresholds",
    "results",
    "provenance",
];

/// Structural check of a serialized report: required keys, version, typed config.
pub fn validate_report(text: &str) -> Result<Value, CliError> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| CliError::Config(format!("report is not JSON: {e}")))?;
    let obj = value
        .as_object()
        .ok_or_else(|| CliError::Config("report must be a JSON object".into()))?;
    for key in REPORT_KEYS {
        if !obj.contains_key(key) {
            return Err(CliError::Config(format!("report is missing `{key}`")));
        }
    }
    if let Some(extra) = obj.keys().find(|k| !REPORT_KEYS.contains(&k.as_str())) {
        return Err(CliError::Config(format!(
            "report has unknown key `{extra}`"
        )));
    }
    if obj["schema_version"] != Value::from(SCHEMA_VERSION) {
        return Err(CliError::Config(format!(
            "unsupported schema_version {}",
            obj["schema_version"]
        )));
    }
    serde_json::from_value::<RunConfig>(obj["config"].clone())
        .map_err(|e| CliError::Config(format!("report config: {e}")))?;
    serde_json::from_value::<Provenance>(obj["provenance"].clone())
        .map_err(|e| CliError::Config(format!("report provenance: {e}")))?;
    Ok(value)
}

/// Write via a temporary file in the target directory, then rename into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path
        .parent()
        .filter(|d| !d.as_os_str().is_empty())
        .unwrap_or(Path::new("."));
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)
        .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    tmp.write_all(bytes)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        // Temporary files are created private; results are ordinary files.
        let _ = tmp
            .as_file()
            .set_permissions(std::fs::Permissions::from_mode(0o644));
    }
    tmp.persist(path)
        .map_err(|e| CliError::Io(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

pub fn write_json<T: Serialize>(path: &Path, report: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(report).map_err(|e| CliError::Io(e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}

/// CSV with `# key: value` metadata lines above a single header row. Floats use
/// the shortest representation that round-trips.
#[derive(Default)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl CsvTable {
    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) {
        self.metadata.push((key.into(), value.to_string()));
    }

    pub fn render(&self) -> Result<Vec<u8>, CliError> {
        let mut out = Vec::new();
        for (k, v) in &self.metadata {
            writeln!(out, "# {k}: {v}").map_err(|e| CliError::Io(e.to_string()))?;
        }
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)
            .map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        w.into_inner().map_err(|e| CliError::Io(e.to_string()))
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        write_atomic(path, &self.render()?)
    }
}

/// Shortest round-trip form, switching to exponent notation for very small or large values.
pub fn num(v: f64) -> String {
    format!("{v:?}")
}

pub fn opt_num(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

pub fn output_path(config: &RunConfig, name: &str) -> PathBuf {
    config.output_dir.join(name)
}
