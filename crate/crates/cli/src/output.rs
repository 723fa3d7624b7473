//! File emission: numeric tables as CSV (with `#` unit comments and a
//! snake_case header) or JSON, plus the metadata sidecar.  Floats are written
//! with the shortest representation that parses back to the same bits.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::{CliError, OUT_DIR_ENV};

/// Uniform grid with `steps` intervals, endpoints included.
pub fn linear_grid(min: f64, max: f64, steps: usize) -> Result<Vec<f64>, CliError> {
    if !min.is_finite() || !max.is_finite() {
        return Err(CliError::Usage("grid bounds must be finite".into()));
    }
    if max < min {
        return Err(CliError::Usage(format!(
            "grid upper bound {max} is below lower bound {min}"
        )));
    }
    if steps == 0 {
        return Err(CliError::Usage("steps must be at least 1".into()));
    }
    Ok((0..=steps)
        .map(|i| min + (max - min) * i as f64 / steps as f64)
        .collect())
}

/// Phase samples uniform over one full turn, endpoint excluded so the grid
/// covers exactly one period.
pub fn phase_grid(points: usize) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return Err(CliError::Usage("points must be at least 1".into()));
    }
    Ok((0..points)
        .map(|i| 2.0 * std::f64::consts::PI * i as f64 / points as f64)
        .collect())
}

/// Default output location: `TWOPHOTON_OUT_DIR` if set, else the working
/// directory.  The directory is created when missing.
pub fn default_path(file_name: &str) -> Result<PathBuf, CliError> {
    let dir = std::env::var_os(OUT_DIR_ENV)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&dir)?;
    Ok(dir.join(file_name))
}

pub fn resolve_out(explicit: Option<&Path>, file_name: &str) -> Result<PathBuf, CliError> {
    match explicit {
        Some(path) => Ok(path.to_path_buf()),
        None => default_path(file_name),
    }
}

/// Sidecar describing one run; written next to every CSV and embedded in
/// JSON-format tables.
#[derive(Clone, Debug, Default, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub f_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phase_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma_grid: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pulses: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub window_ns: Option<f64>,
    pub columns: Vec<String>,
    /// Scalar results derived from the run (fitted frequencies and such).
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub derived: BTreeMap<String, f64>,
}

impl RunMetadata {
    pub fn new(command: &str) -> Self {
        Self {
            command: command.to_string(),
            ..Self::default()
        }
    }
}

/// One numeric table: comment lines document units, the header names the
/// columns, every cell is an f64.
#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    #[serde(skip)]
    pub comments: Vec<String>,
    pub metadata: RunMetadata,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl SweepTable {
    pub fn new(metadata: RunMetadata, columns: Vec<String>) -> Self {
        Self {
            comments: Vec::new(),
            metadata,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn comment(&mut self, line: impl Into<String>) {
        self.comments.push(line.into());
    }

    pub fn push_row(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// Write as CSV plus a `<stem>.meta.json` sidecar; returns both paths.
    pub fn write_csv(&self, path: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut text = String::new();
        for line in &self.comments {
            text.push_str("# ");
            text.push_str(line);
            text.push('\n');
        }
        text.push_str(&self.columns.join(","));
        text.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        write_atomic(path, text.as_bytes())?;

        let mut metadata = self.metadata.clone();
        metadata.columns = self.columns.clone();
        let sidecar = path.with_extension("meta.json");
        write_atomic(&sidecar, serde_json::to_string_pretty(&metadata)?.as_bytes())?;
        Ok(vec![path.to_path_buf(), sidecar])
    }

    /// Write as a single JSON document with the metadata embedded.
    pub fn write_json(&self, path: &Path) -> Result<Vec<PathBuf>, CliError> {
        let mut table = self.clone();
        table.metadata.columns = table.columns.clone();
        write_atomic(path, serde_json::to_string_pretty(&table)?.as_bytes())?;
        Ok(vec![path.to_path_buf()])
    }

    pub fn write(
        &self,
        format: crate::args::OutputFormat,
        path: &Path,
    ) -> Result<Vec<PathBuf>, CliError> {
        match format {
            crate::args::OutputFormat::Csv => self.write_csv(path),
            crate::args::OutputFormat::Json => self.write_json(path),
        }
    }
}

fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let mut file = std::fs::File::create(path)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    file.write_all(bytes)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(())
}

pub fn write_json_value<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    write_atomic(path, serde_json::to_string_pretty(value)?.as_bytes())
}

/// Full dump of the two-photon output state and the post-selected block;
/// serialization round-trips bit-exactly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateDump {
    pub gamma: f64,
    pub modes: usize,
    /// Canonical basis labels of the two-photon sector rows.
    pub basis: Vec<String>,
    pub output_re: Vec<Vec<f64>>,
    pub output_im: Vec<Vec<f64>>,
    /// Post-selected block over the (0,1) vs (2,3) partition.
    pub qubit_re: Vec<Vec<f64>>,
    pub qubit_im: Vec<Vec<f64>>,
    pub t: f64,
    pub u: f64,
    pub v: f64,
    pub w: f64,
    pub success_probability: f64,
}
