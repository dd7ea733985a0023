//! CSV tables, JSON reports and the run manifest.
//!
//! Numbers are written as `{:.16e}` (17 significant digits), empty cells
//! mark values that do not apply, lines end in `\n`.

use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const MANIFEST: &str = "manifest.json";

pub const DIAGNOSTICS_COLUMNS: [&str; 10] = ["t", "mass", "energy", "px", "py", "pz", "h1", "h2", "e_i", "e_d"];
pub const GROWTH_COLUMNS: [&str; 4] = ["t", "h1", "h2", "envelope_ratio"];
pub const DRIFT_COLUMNS: [&str; 5] = ["n", "s", "t_loc", "dt", "drift_sup"];
pub const SCHEDULE_COLUMNS: [&str; 5] = ["s", "n", "lambda", "t_exp", "energy_exp"];
pub const SCALING_COLUMNS: [&str; 4] = ["lambda", "t", "dt", "relative_error"];

pub fn format_number(v: f64) -> String {
    format!("{v:.16e}")
}

pub struct CsvWriter {
    path: PathBuf,
    out: BufWriter<File>,
    width: usize,
}

impl CsvWriter {
    pub fn create(path: &Path, columns: &[&str]) -> CliResult<Self> {
        let file = File::create(path).map_err(|e| CliError::io(path, e))?;
        let mut w = Self { path: path.to_path_buf(), out: BufWriter::new(file), width: columns.len() };
        w.line(&columns.join(","))?;
        Ok(w)
    }

    fn line(&mut self, text: &str) -> CliResult<()> {
        writeln!(self.out, "{text}").map_err(|e| CliError::io(&self.path, e))
    }

    pub fn row(&mut self, cells: &[Option<f64>]) -> CliResult<()> {
        assert_eq!(cells.len(), self.width, "row width");
        let text: Vec<String> = cells.iter().map(|c| c.map(format_number).unwrap_or_default()).collect();
        self.line(&text.join(","))
    }

    pub fn finish(mut self) -> CliResult<PathBuf> {
        self.out.flush().map_err(|e| CliError::io(&self.path, e))?;
        Ok(self.path)
    }
}

/// Writes selected columns of a table given as named columns and rows.
pub fn write_table(
    path: &Path,
    columns: &[&str],
    source_columns: &[String],
    rows: &[Vec<Option<f64>>],
) -> CliResult<PathBuf> {
    let index: Vec<Option<usize>> =
        columns.iter().map(|c| source_columns.iter().position(|s| s == c)).collect();
    let mut w = CsvWriter::create(path, columns)?;
    for row in rows {
        let cells: Vec<Option<f64>> = index.iter().map(|j| j.and_then(|j| row[j])).collect();
        w.row(&cells)?;
    }
    w.finish()
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> CliResult<PathBuf> {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = fs::read(path).map_err(|e| CliError::io(path, e))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

pub fn unix_seconds() -> f64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
}

#[derive(Debug, Serialize)]
pub struct FileDigest {
    pub name: String,
    pub sha256: String,
}

#[derive(Debug, Serialize)]
pub struct RunManifest<'a> {
    pub artifact: &'static str,
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub grid: Option<String>,
    pub grid_hash: Option<String>,
    pub started_unix: f64,
    pub finished_unix: f64,
    pub files: Vec<FileDigest>,
}

pub fn grid_hash(description: &str) -> String {
    hex::encode(Sha256::digest(description.as_bytes()))
}

/// Digests `files` and writes the manifest through a rename, so it appears
/// complete or not at all.
pub fn commit_manifest(
    dir: &Path,
    config: &RunConfig,
    grid: Option<String>,
    started: f64,
    files: &[PathBuf],
) -> CliResult<PathBuf> {
    let digests = files
        .iter()
        .map(|p| {
            Ok(FileDigest {
                name: p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default(),
                sha256: sha256_file(p)?,
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    let manifest = RunManifest {
        artifact: "wgnls",
        version: env!("CARGO_PKG_VERSION"),
        config,
        grid_hash: grid.as_deref().map(grid_hash),
        grid,
        started_unix: started,
        finished_unix: unix_seconds(),
        files: digests,
    };
    let partial = dir.join("manifest.json.partial");
    write_json(&partial, &manifest)?;
    let target = dir.join(MANIFEST);
    fs::rename(&partial, &target).map_err(|e| CliError::io(&target, e))?;
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(format_number(1.0), "1.0000000000000000e0");
        assert_eq!(format_number(-0.25), "-2.5000000000000000e-1");
        let x = 0.1 + 0.2;
        assert_eq!(format_number(x).parse::<f64>().unwrap(), x);
    }

    #[test]
    fn tables_leave_missing_cells_empty() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("drift.csv");
        let source = vec!["n".to_string(), "drift_sup".to_string(), "s".to_string()];
        let rows = vec![vec![Some(4.0), Some(0.5), None]];
        write_table(&path, &DRIFT_COLUMNS, &source, &rows).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text, "n,s,t_loc,dt,drift_sup\n4.0000000000000000e0,,,,5.0000000000000000e-1\n");
    }
}
