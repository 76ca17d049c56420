use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use serde_json::json;

use super::{unix_time, SimRecord, SweepConfig, CI_LEVEL, CI_METHOD};
use crate::error::{Error, Result};

/// CSV column order; the JSON-lines twin uses the same keys.
pub const RECORD_COLUMNS: [&str; 19] = [
    "scheme",
    "channel",
    "grid_index",
    "param",
    "sigma",
    "k",
    "frames",
    "bit_errors",
    "block_errors",
    "ber",
    "bler",
    "ci_lo",
    "ci_hi",
    "ani",
    "ani_ldpc",
    "ani_polar",
    "wall_time_s",
    "timestamp",
    "config_digest",
];

/// Files written for one sweep.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OutputPaths {
    pub csv: PathBuf,
    pub jsonl: PathBuf,
    pub meta: PathBuf,
}

fn with_suffix(stem: &Path, suffix: &str) -> PathBuf {
    let mut s = stem.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// Reads every record of a JSON-lines file.
pub fn load_records(path: &Path) -> Result<Vec<SimRecord>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            what: "sweep record",
            detail: format!("line {}: {e}", i + 1),
        })?);
    }
    Ok(out)
}

impl OutputPaths {
    pub fn from_stem(stem: &Path) -> Self {
        OutputPaths {
            csv: with_suffix(stem, ".csv"),
            jsonl: with_suffix(stem, ".jsonl"),
            meta: with_suffix(stem, ".meta.json"),
        }
    }

    /// Records already written for this digest. Records of another
    /// configuration are an error.
    pub(super) fn existing_records(&self, digest: &str) -> Result<Vec<SimRecord>> {
        if !self.jsonl.exists() {
            return Ok(Vec::new());
        }
        let records = load_records(&self.jsonl)?;
        if let Some(r) = records.iter().find(|r| r.config_digest != digest) {
            return Err(Error::param(format!(
                "{} holds records of another sweep (digest {}, expected {digest})",
                self.jsonl.display(),
                r.config_digest
            )));
        }
        Ok(records)
    }

    pub(super) fn write_meta(&self, cfg: &SweepConfig, digest: &str) -> Result<()> {
        let meta = json!({
            "config": cfg,
            "config_digest": digest,
            "ci_method": CI_METHOD,
            "ci_level": CI_LEVEL,
            "ci_quantity": "ber",
            "columns": RECORD_COLUMNS,
            "updated": unix_time(),
        });
        let text = serde_json::to_string_pretty(&meta).expect("metadata serializes");
        std::fs::write(&self.meta, text + "\n").map_err(|e| Error::io(&self.meta, e))
    }

    pub(super) fn appender(&self) -> Result<Appender> {
        let open = |p: &Path| {
            OpenOptions::new()
                .create(true)
                .append(true)
                .open(p)
                .map_err(|e| Error::io(p, e))
        };
        let csv_file = open(&self.csv)?;
        let fresh = csv_file
            .metadata()
            .map_err(|e| Error::io(&self.csv, e))?
            .len()
            == 0;
        let mut csv = csv::WriterBuilder::new()
            .has_headers(false)
            .from_writer(csv_file);
        if fresh {
            csv.write_record(RECORD_COLUMNS)
                .map_err(|e| self.csv_err(e))?;
            csv.flush().map_err(|e| Error::io(&self.csv, e))?;
        }
        Ok(Appender {
            paths: self.clone(),
            csv,
            jsonl: open(&self.jsonl)?,
        })
    }

    fn csv_err(&self, e: csv::Error) -> Error {
        Error::io(&self.csv, std::io::Error::other(e))
    }
}

pub(super) struct Appender {
    paths: OutputPaths,
    csv: csv::Writer<File>,
    jsonl: File,
}

impl Appender {
    pub(super) fn append(&mut self, r: &SimRecord) -> Result<()> {
        self.csv.serialize(r).map_err(|e| self.paths.csv_err(e))?;
        self.csv
            .flush()
            .map_err(|e| Error::io(&self.paths.csv, e))?;
        let line = serde_json::to_string(r).expect("record serializes");
        writeln!(self.jsonl, "{line}").map_err(|e| Error::io(&self.paths.jsonl, e))
    }
}
