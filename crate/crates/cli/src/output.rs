//! CSV and JSON emission plus the run manifest.

use std::fs::File;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use metaemf::ConfigDocument;
use serde::Serialize;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Model(#[from] metaemf::Error),
    #[error("non-finite value in column {0}")]
    NonFinite(String),
    #[error("{0} validation check(s) failed")]
    ValidationFailed(usize),
    #[error("io: {0}")]
    Io(#[from] io::Error),
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

pub enum Cell {
    Num(f64),
    Text(&'static str),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

/// A CSV table with a one-line header.
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    fn check_finite(&self) -> Result<(), CliError> {
        for row in &self.rows {
            for (i, cell) in row.iter().enumerate() {
                if let Cell::Num(v) = cell {
                    if !v.is_finite() {
                        return Err(CliError::NonFinite(self.header[i].to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn write<W: Write>(&self, out: W) -> Result<(), CliError> {
        self.check_finite()?;
        let mut w = csv::Writer::from_writer(out);
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|c| match c {
                Cell::Num(v) => v.to_string(),
                Cell::Text(s) => s.to_string(),
            }))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Provenance written next to every output file.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: Vec<String>,
    pub config: ConfigDocument,
    pub master_seed: u64,
    pub workers: Option<usize>,
    pub duration_s: f64,
    pub output: Option<PathBuf>,
    /// Command-specific summary values.
    pub summary: serde_json::Value,
}

pub fn manifest_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

/// Opens `out` or stdout.
pub fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(io::BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

pub fn write_manifest(manifest: &RunManifest) -> Result<(), CliError> {
    if let Some(out) = &manifest.output {
        let file = File::create(manifest_path(out))?;
        serde_json::to_writer_pretty(file, manifest)?;
    }
    Ok(())
}
