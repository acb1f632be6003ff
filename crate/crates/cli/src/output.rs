//! Artifact buffering, CSV formatting and the hashed manifest.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::CliError;

/// A file produced by a stage, held in memory until the stage succeeds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub bytes: Vec<u8>,
}

impl Artifact {
    pub fn text(name: impl Into<String>, text: String) -> Self {
        Artifact {
            name: name.into(),
            bytes: text.into_bytes(),
        }
    }

    pub fn json<T: Serialize>(name: impl Into<String>, value: &T) -> Self {
        let mut text = serde_json::to_string_pretty(value).expect("plain data serializes");
        text.push('\n');
        Artifact::text(name, text)
    }
}

/// Float formatting shared by every CSV: 17 significant digits round-trip
/// an f64 exactly.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Comma-separated table with a header row and LF line endings.
#[derive(Debug, Clone)]
pub struct Csv {
    out: String,
    width: usize,
}

pub enum Cell {
    F(f64),
    I(i64),
    S(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}

impl From<i8> for Cell {
    fn from(v: i8) -> Self {
        Cell::I(v.into())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::I(v.into())
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}

impl Csv {
    pub fn new(header: &[&str]) -> Self {
        Csv {
            out: header.join(",") + "\n",
            width: header.len(),
        }
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.width, "row width");
        for (i, c) in cells.into_iter().enumerate() {
            if i > 0 {
                self.out.push(',');
            }
            match c {
                Cell::F(v) => self.out.push_str(&num(v)),
                Cell::I(v) => {
                    let _ = write!(self.out, "{v}");
                }
                Cell::S(v) => self.out.push_str(&v),
            }
        }
        self.out.push('\n');
    }

    pub fn finish(self, name: impl Into<String>) -> Artifact {
        Artifact::text(name, self.out)
    }
}

#[macro_export]
macro_rules! row {
    ($($x:expr),* $(,)?) => { vec![$($crate::output::Cell::from($x)),*] };
}

#[derive(Debug, Serialize)]
struct ManifestEntry<'a> {
    path: &'a str,
    bytes: usize,
    sha256: String,
}

#[derive(Debug, Serialize)]
struct Manifest<'a> {
    stage: &'a str,
    seed: u64,
    files: Vec<ManifestEntry<'a>>,
}

pub const MANIFEST: &str = "manifest.json";

/// Writes every artifact plus `manifest.json`. If any write fails, files
/// written so far are removed again.
pub fn write_all(
    dir: &Path,
    stage: &str,
    seed: u64,
    mut artifacts: Vec<Artifact>,
) -> Result<Vec<PathBuf>, CliError> {
    artifacts.sort_by(|a, b| a.name.cmp(&b.name));
    let files = artifacts
        .iter()
        .map(|a| ManifestEntry {
            path: &a.name,
            bytes: a.bytes.len(),
            sha256: hex::encode(Sha256::digest(&a.bytes)),
        })
        .collect();
    let manifest = Artifact::json(MANIFEST, &Manifest { stage, seed, files });
    artifacts.push(manifest);

    let created_dir = !dir.exists();
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::new();
    for a in &artifacts {
        let path = dir.join(&a.name);
        if let Err(e) = fs::write(&path, &a.bytes) {
            for p in &written {
                let _ = fs::remove_file(p);
            }
            if created_dir {
                let _ = fs::remove_dir(dir);
            }
            return Err(CliError::Io(format!("{}: {e}", path.display())));
        }
        written.push(path);
    }
    Ok(written)
}
