//! Output-file plumbing: atomic writes and the CSV row formats.
//!
//! Every writer here goes through a temp file in the destination directory
//! followed by a rename, so partially written outputs never land under the
//! final name. All row types round-trip through their own readers.

use std::io::Write;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use pbrkit_core::vision::ColorObservation;

use crate::errors::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let dir = dir.unwrap_or_else(|| Path::new("."));
    std::fs::create_dir_all(dir)?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.persist(path)
        .map_err(|e| CliError::domain("io", e.to_string()))?;
    Ok(())
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::domain("csv", e.to_string()))?;
    write_atomic(path, &bytes)
}

fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>, CliError> {
    let mut r = csv::Reader::from_path(path)
        .map_err(|e| CliError::domain("csv", format!("{}: {e}", path.display())))?;
    let mut out = Vec::new();
    for row in r.deserialize() {
        out.push(row?);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObservationRow {
    pub day: f64,
    pub test_r: f64,
    pub test_g: f64,
    pub test_b: f64,
    pub ctrl_r: f64,
    pub ctrl_g: f64,
    pub ctrl_b: f64,
}

impl From<&ColorObservation> for ObservationRow {
    fn from(o: &ColorObservation) -> Self {
        ObservationRow {
            day: o.day,
            test_r: o.test_rgb[0],
            test_g: o.test_rgb[1],
            test_b: o.test_rgb[2],
            ctrl_r: o.control_rgb[0],
            ctrl_g: o.control_rgb[1],
            ctrl_b: o.control_rgb[2],
        }
    }
}

impl From<&ObservationRow> for ColorObservation {
    fn from(r: &ObservationRow) -> Self {
        ColorObservation {
            day: r.day,
            test_rgb: [r.test_r, r.test_g, r.test_b],
            control_rgb: [r.ctrl_r, r.ctrl_g, r.ctrl_b],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DifferenceRow {
    pub measure: String,
    pub day: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitRow {
    pub measure: String,
    pub degree: usize,
    pub rho: f64,
    pub r2: f64,
}

/// Input format for `detect run --manifest`: one image per row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub path: String,
    pub day: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BomRow {
    pub kind: String,
    pub item: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRow {
    pub instance: usize,
    pub rotation_step: u8,
}

pub fn write_observations(path: &Path, rows: &[ObservationRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_observations(path: &Path) -> Result<Vec<ObservationRow>, CliError> {
    read_csv(path)
}

pub fn write_differences(path: &Path, rows: &[DifferenceRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_differences(path: &Path) -> Result<Vec<DifferenceRow>, CliError> {
    read_csv(path)
}

pub fn write_fits(path: &Path, rows: &[FitRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_fits(path: &Path) -> Result<Vec<FitRow>, CliError> {
    read_csv(path)
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestRow>, CliError> {
    read_csv(path)
}

pub fn write_bom(path: &Path, rows: &[BomRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_bom(path: &Path) -> Result<Vec<BomRow>, CliError> {
    read_csv(path)
}

pub fn write_solution(path: &Path, rows: &[SolutionRow]) -> Result<(), CliError> {
    write_csv(path, rows)
}

pub fn read_solution(path: &Path) -> Result<Vec<SolutionRow>, CliError> {
    read_csv(path)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::domain("io", e.to_string()))?;
    text.push('\n');
    write_atomic(path, text.as_bytes())
}
