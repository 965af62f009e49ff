//! Dataset directories: one JSONL file per split plus `manifest.json`.
//!
//! The manifest carries the generator configuration (seed and plane geometry
//! included), a SHA-256 digest of every split file, a digest of the balance
//! statistics, and a checksum over its own content. Reading verifies all of
//! them.

use std::collections::HashMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use super::record::{PredictionRecord, SampleRecord};
use super::stats::stats_report;
use crate::sampler::{GeneratorConfig, Sample};

pub const FORMAT_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}:{line}: malformed record: {message}")]
    MalformedRecord { path: PathBuf, line: usize, message: String },
    #[error("{path}: malformed manifest: {message}")]
    MalformedManifest { path: PathBuf, message: String },
    #[error("dataset format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u32, expected: u32 },
    #[error("checksum mismatch for {what}")]
    ChecksumMismatch { what: String },
    #[error("sample `{id}` belongs to split `{split}`, which the configuration does not declare")]
    UnknownSplit { id: String, split: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io { path: path.to_path_buf(), source }
}

pub(crate) fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub name: String,
    pub file: String,
    pub records: usize,
    pub sha256: String,
}

/// Conventions the scores depend on, recorded for reproducibility.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoringConvention {
    /// Cost charged to position when an object is visible in only one scene.
    pub visibility_mismatch_cost: u32,
    /// Whether intrinsic attributes are compared when the object is visible in only one scene.
    pub compare_intrinsics_across_visibility: bool,
    /// Whether strict application skips failing steps rather than aborting.
    pub skip_failed_steps: bool,
}

impl Default for ScoringConvention {
    fn default() -> Self {
        ScoringConvention {
            visibility_mismatch_cost: 1,
            compare_intrinsics_across_visibility: true,
            skip_failed_steps: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub format_version: u32,
    pub created_by: String,
    pub generator: GeneratorConfig,
    pub scoring: ScoringConvention,
    pub splits: Vec<SplitEntry>,
    pub stats_sha256: String,
    pub checksum: String,
}

impl DatasetManifest {
    fn compute_checksum(&self) -> String {
        let mut body = self.clone();
        body.checksum = String::new();
        sha256_hex(serde_json::to_string(&body).expect("manifest serializes").as_bytes())
    }

    pub fn to_pretty_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest serializes");
        s.push('\n');
        s
    }
}

/// Samples of a dataset directory together with its manifest.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub manifest: DatasetManifest,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn by_id(&self) -> HashMap<&str, &Sample> {
        self.samples.iter().map(|s| (s.id.as_str(), s)).collect()
    }

    pub fn split(&self, name: &str) -> Vec<&Sample> {
        self.samples.iter().filter(|s| s.split == name).collect()
    }
}

/// Serializes samples as JSONL, one record per line.
pub fn encode_jsonl(samples: &[&Sample]) -> Vec<u8> {
    let mut out = Vec::new();
    for s in samples {
        serde_json::to_writer(&mut out, &SampleRecord::from_sample(s)).expect("record serializes");
        out.push(b'\n');
    }
    out
}

/// Writes `samples` under `dir`, one file per split declared in `config`.
pub fn write_dataset(samples: &[Sample], config: &GeneratorConfig, dir: &Path) -> Result<DatasetManifest, IoError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    if let Some(stray) = samples.iter().find(|s| !config.splits.iter().any(|sp| sp.name == s.split)) {
        return Err(IoError::UnknownSplit { id: stray.id.clone(), split: stray.split.clone() });
    }
    let mut splits = Vec::new();
    for split in &config.splits {
        let members: Vec<&Sample> = samples.iter().filter(|s| s.split == split.name).collect();
        let bytes = encode_jsonl(&members);
        let file = format!("{}.jsonl", split.name);
        let path = dir.join(&file);
        let handle = fs::File::create(&path).map_err(io_err(&path))?;
        let mut w = BufWriter::new(handle);
        w.write_all(&bytes).map_err(io_err(&path))?;
        w.flush().map_err(io_err(&path))?;
        splits.push(SplitEntry { name: split.name.clone(), file, records: members.len(), sha256: sha256_hex(&bytes) });
    }
    let stats = serde_json::to_string(&stats_report(samples)).expect("stats serialize");
    let mut manifest = DatasetManifest {
        format_version: FORMAT_VERSION,
        created_by: concat!("tvr-core ", env!("CARGO_PKG_VERSION")).to_string(),
        generator: config.clone(),
        scoring: ScoringConvention::default(),
        splits,
        stats_sha256: sha256_hex(stats.as_bytes()),
        checksum: String::new(),
    };
    manifest.checksum = manifest.compute_checksum();
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, manifest.to_pretty_json()).map_err(io_err(&path))?;
    Ok(manifest)
}

pub fn read_manifest(dir: &Path) -> Result<DatasetManifest, IoError> {
    let path = dir.join(MANIFEST_FILE);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let raw: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| IoError::MalformedManifest { path: path.clone(), message: e.to_string() })?;
    let found = raw.get("format_version").and_then(|v| v.as_u64()).unwrap_or(0) as u32;
    if found != FORMAT_VERSION {
        return Err(IoError::VersionMismatch { found, expected: FORMAT_VERSION });
    }
    let manifest: DatasetManifest = serde_json::from_value(raw)
        .map_err(|e| IoError::MalformedManifest { path: path.clone(), message: e.to_string() })?;
    if manifest.compute_checksum() != manifest.checksum {
        return Err(IoError::ChecksumMismatch { what: MANIFEST_FILE.to_string() });
    }
    Ok(manifest)
}

/// Parses JSONL sample records; `path` is only used in error messages.
pub fn decode_jsonl(bytes: &[u8], manifest: &DatasetManifest, path: &Path) -> Result<Vec<Sample>, IoError> {
    let text = std::str::from_utf8(bytes).map_err(|e| IoError::MalformedRecord {
        path: path.to_path_buf(),
        line: 1,
        message: e.to_string(),
    })?;
    let plane = manifest.generator.plane;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let malformed = |message: String| IoError::MalformedRecord { path: path.to_path_buf(), line: i + 1, message };
        let record: SampleRecord = serde_json::from_str(line).map_err(|e| malformed(e.to_string()))?;
        out.push(record.into_sample(plane).map_err(|e| malformed(e.to_string()))?);
    }
    Ok(out)
}

pub fn read_dataset(dir: &Path) -> Result<Dataset, IoError> {
    let manifest = read_manifest(dir)?;
    let mut samples = Vec::new();
    for split in &manifest.splits {
        let path = dir.join(&split.file);
        let bytes = fs::read(&path).map_err(io_err(&path))?;
        if sha256_hex(&bytes) != split.sha256 {
            return Err(IoError::ChecksumMismatch { what: split.file.clone() });
        }
        samples.extend(decode_jsonl(&bytes, &manifest, &path)?);
    }
    Ok(Dataset { manifest, samples })
}

pub fn read_predictions(path: &Path) -> Result<Vec<PredictionRecord>, IoError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, line)| {
            serde_json::from_str(line).map_err(|e| IoError::MalformedRecord {
                path: path.to_path_buf(),
                line: i + 1,
                message: e.to_string(),
            })
        })
        .collect()
}

pub fn write_predictions(predictions: &[PredictionRecord], path: &Path) -> Result<(), IoError> {
    let mut out = Vec::new();
    for p in predictions {
        serde_json::to_writer(&mut out, p).expect("prediction serializes");
        out.push(b'\n');
    }
    fs::write(path, out).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sampler::generate_dataset;

    fn small_config() -> GeneratorConfig {
        let mut cfg = GeneratorConfig::default().with_seed(3);
        cfg.splits = vec![
            crate::sampler::SplitSize { name: "train".into(), size: 60 },
            crate::sampler::SplitSize { name: "test".into(), size: 40 },
        ];
        cfg
    }

    #[test]
    fn round_trip_is_exact() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config();
        let samples = generate_dataset(&cfg).unwrap();
        let manifest = write_dataset(&samples, &cfg, dir.path()).unwrap();
        assert_eq!(manifest.splits.iter().map(|s| s.records).sum::<usize>(), 100);

        let first = fs::read(dir.path().join("train.jsonl")).unwrap();
        let data = read_dataset(dir.path()).unwrap();
        assert_eq!(data.samples, samples);
        assert_eq!(data.manifest, manifest);

        let again = tempfile::tempdir().unwrap();
        write_dataset(&data.samples, &data.manifest.generator, again.path()).unwrap();
        assert_eq!(fs::read(again.path().join("train.jsonl")).unwrap(), first);
        assert_eq!(
            fs::read(again.path().join(MANIFEST_FILE)).unwrap(),
            fs::read(dir.path().join(MANIFEST_FILE)).unwrap()
        );
    }

    #[test]
    fn truncated_line_is_reported_with_its_number() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config();
        let samples = generate_dataset(&cfg).unwrap();
        let manifest = write_dataset(&samples, &cfg, dir.path()).unwrap();
        let path = dir.path().join("test.jsonl");
        let text = fs::read_to_string(&path).unwrap();
        let mut lines: Vec<&str> = text.lines().collect();
        let cut = &lines[4][..lines[4].len() / 2];
        lines[4] = cut;
        let broken = lines.join("\n");
        let err = decode_jsonl(broken.as_bytes(), &manifest, &path).unwrap_err();
        assert!(matches!(err, IoError::MalformedRecord { line: 5, .. }), "{err}");

        fs::write(&path, broken).unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(IoError::ChecksumMismatch { .. })));
    }

    #[test]
    fn tampered_manifest_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config();
        let samples = generate_dataset(&cfg).unwrap();
        write_dataset(&samples, &cfg, dir.path()).unwrap();
        let path = dir.path().join(MANIFEST_FILE);
        let text = fs::read_to_string(&path).unwrap();

        fs::write(&path, text.replace("\"seed\": 3", "\"seed\": 4")).unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(IoError::ChecksumMismatch { .. })));

        fs::write(&path, text.replace("\"format_version\": 1", "\"format_version\": 9")).unwrap();
        assert!(matches!(read_dataset(dir.path()), Err(IoError::VersionMismatch { found: 9, expected: 1 })));
    }

    #[test]
    fn predictions_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = small_config();
        let samples = generate_dataset(&cfg).unwrap();
        let preds: Vec<PredictionRecord> = samples
            .iter()
            .map(|s| PredictionRecord { id: s.id.clone(), transformations: s.reference.clone() })
            .collect();
        let path = dir.path().join("pred.jsonl");
        write_predictions(&preds, &path).unwrap();
        assert_eq!(read_predictions(&path).unwrap(), preds);
        fs::write(&path, "{\"id\": 3}\n").unwrap();
        assert!(matches!(read_predictions(&path), Err(IoError::MalformedRecord { line: 1, .. })));
    }
}
