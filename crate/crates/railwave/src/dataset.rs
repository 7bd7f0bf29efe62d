//! On-disk benchmark datasets and prediction files.
//!
//! A dataset directory holds `manifest.json` plus one binary file per split.
//! All binary fields are little-endian.
//!
//! Split file (`RWCE`):
//!
//! | field | type |
//! |-------|------|
//! | magic | `b"RWCE"` |
//! | version | u32 |
//! | record count | u64 |
//! | per record: snr_db | f32 |
//! | per record: T | u32 |
//! | per record: T × (pa_index u32, re f32, im f32) | pilots, oldest first |
//! | per record: pa_count × (re f32, im f32) | label |
//!
//! Prediction file (`RWPR`): magic, version u32, count u64, then
//! pa_count × (re f32, im f32) per sample in dataset order.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex32;
use railwave_core::ce::{CeParams, CeSample, Pilot, Split};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::Settings;
use crate::error::{DatasetError, Error, Result};
use crate::table::write_atomic;

pub const DATASET_MAGIC: [u8; 4] = *b"RWCE";
pub const PREDICTION_MAGIC: [u8; 4] = *b"RWPR";
pub const FORMAT_VERSION: u32 = 1;
pub const SCHEMA_VERSION: u32 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";

const HEADER_LEN: usize = 16;

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

/// Hash identifying the scenario parameters a dataset was drawn from.
pub fn scenario_hash(params: &CeParams) -> String {
    sha256_hex(serde_json::to_string(params).expect("params serialize").as_bytes())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitEntry {
    pub file: String,
    pub count: u64,
    pub history: usize,
    pub sha256: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub schema_version: u32,
    pub format_version: u32,
    pub master_seed: u64,
    pub scenario: CeParams,
    pub scenario_hash: String,
    pub normalization_constant: f64,
    /// Effective run configuration that produced the dataset.
    pub config: Settings,
    pub splits: BTreeMap<String, SplitEntry>,
}

impl Manifest {
    pub fn new(master_seed: u64, scenario: CeParams, normalization_constant: f64, config: Settings) -> Self {
        Manifest {
            schema_version: SCHEMA_VERSION,
            format_version: FORMAT_VERSION,
            master_seed,
            scenario_hash: scenario_hash(&scenario),
            scenario,
            normalization_constant,
            config,
            splits: BTreeMap::new(),
        }
    }

    /// Whether `other` was generated from the same scenario and seed, so
    /// their splits may share a manifest.
    pub fn compatible(&self, other: &Manifest) -> bool {
        self.schema_version == other.schema_version
            && self.master_seed == other.master_seed
            && self.scenario_hash == other.scenario_hash
    }

    pub fn read(dir: &Path) -> Result<Self> {
        let path = dir.join(MANIFEST_FILE);
        let text = fs::read(&path)
            .map_err(|source| DatasetError::Io { path: path.clone(), source })?;
        let manifest: Manifest = serde_json::from_slice(&text)
            .map_err(|source| DatasetError::Manifest { path: path.clone(), source })?;
        if manifest.schema_version != SCHEMA_VERSION {
            return Err(DatasetError::Version {
                path,
                found: manifest.schema_version,
                supported: SCHEMA_VERSION,
            }
            .into());
        }
        Ok(manifest)
    }

    pub fn write(&self, dir: &Path) -> Result<()> {
        let mut text = serde_json::to_vec_pretty(self).expect("manifest serializes");
        text.push(b'\n');
        write_atomic(&dir.join(MANIFEST_FILE), &text)
    }

    pub fn split(&self, split: Split) -> Result<&SplitEntry> {
        self.splits
            .get(split.name())
            .ok_or_else(|| DatasetError::MissingSplit(split.name().into()).into())
    }

    pub fn pa_count(&self) -> usize {
        self.scenario.pa_count
    }

    /// Reads a split, checking its hash and record count against the manifest.
    pub fn load_split(&self, dir: &Path, split: Split) -> Result<Vec<CeSample>> {
        let entry = self.split(split)?;
        let path = dir.join(&entry.file);
        let bytes = fs::read(&path).map_err(|source| DatasetError::Io { path: path.clone(), source })?;
        let found = sha256_hex(&bytes);
        if found != entry.sha256 {
            return Err(DatasetError::HashMismatch { path, expected: entry.sha256.clone(), found }.into());
        }
        let header = read_header(&path, &bytes, DATASET_MAGIC, "RWCE")?;
        if header != entry.count {
            return Err(DatasetError::CountMismatch { path, expected: entry.count, found: header }.into());
        }
        Ok(decode_samples(&path, &bytes, self.pa_count())?)
    }
}

pub fn split_file_name(split: Split) -> String {
    format!("{}.rwce", split.name())
}

fn put_header(out: &mut Vec<u8>, magic: [u8; 4], count: u64) {
    out.extend_from_slice(&magic);
    out.extend_from_slice(&FORMAT_VERSION.to_le_bytes());
    out.extend_from_slice(&count.to_le_bytes());
}

fn put_complex(out: &mut Vec<u8>, c: Complex32) {
    out.extend_from_slice(&c.re.to_le_bytes());
    out.extend_from_slice(&c.im.to_le_bytes());
}

pub fn encode_samples(samples: &[CeSample]) -> Vec<u8> {
    let per = samples.first().map_or(0, |s| 8 + 12 * s.pilots.len() + 8 * s.label.len());
    let mut out = Vec::with_capacity(HEADER_LEN + per * samples.len());
    put_header(&mut out, DATASET_MAGIC, samples.len() as u64);
    for s in samples {
        out.extend_from_slice(&s.snr_db.to_le_bytes());
        out.extend_from_slice(&(s.pilots.len() as u32).to_le_bytes());
        for p in &s.pilots {
            out.extend_from_slice(&p.pa_index.to_le_bytes());
            put_complex(&mut out, p.observation);
        }
        for &c in &s.label {
            put_complex(&mut out, c);
        }
    }
    out
}

pub fn encode_predictions(predictions: &[Vec<Complex32>]) -> Vec<u8> {
    let per = predictions.first().map_or(0, |p| 8 * p.len());
    let mut out = Vec::with_capacity(HEADER_LEN + per * predictions.len());
    put_header(&mut out, PREDICTION_MAGIC, predictions.len() as u64);
    for p in predictions {
        for &c in p {
            put_complex(&mut out, c);
        }
    }
    out
}

/// Little-endian cursor that reports the record it ran out of data in.
struct Cursor<'a> {
    path: &'a Path,
    bytes: &'a [u8],
    pos: usize,
    record: u64,
}

impl<'a> Cursor<'a> {
    fn take<const N: usize>(&mut self) -> std::result::Result<[u8; N], DatasetError> {
        let end = self.pos + N;
        let chunk = self.bytes.get(self.pos..end).ok_or_else(|| DatasetError::Truncated {
            path: self.path.to_path_buf(),
            record: self.record,
        })?;
        self.pos = end;
        Ok(chunk.try_into().expect("slice of length N"))
    }

    fn u32(&mut self) -> std::result::Result<u32, DatasetError> {
        self.take::<4>().map(u32::from_le_bytes)
    }

    fn f32(&mut self) -> std::result::Result<f32, DatasetError> {
        self.take::<4>().map(f32::from_le_bytes)
    }

    fn complex(&mut self) -> std::result::Result<Complex32, DatasetError> {
        Ok(Complex32::new(self.f32()?, self.f32()?))
    }
}

/// Validates magic and version, returning the declared record count.
fn read_header(
    path: &Path,
    bytes: &[u8],
    magic: [u8; 4],
    name: &'static str,
) -> std::result::Result<u64, DatasetError> {
    if bytes.len() < 4 || bytes[..4] != magic {
        return Err(DatasetError::Format { path: path.to_path_buf(), expected: name });
    }
    if bytes.len() < HEADER_LEN {
        return Err(DatasetError::Truncated { path: path.to_path_buf(), record: 0 });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().expect("4 bytes"));
    if version != FORMAT_VERSION {
        return Err(DatasetError::Version { path: path.to_path_buf(), found: version, supported: FORMAT_VERSION });
    }
    Ok(u64::from_le_bytes(bytes[8..16].try_into().expect("8 bytes")))
}

fn trailing(path: &Path, cursor: &Cursor<'_>) -> std::result::Result<(), DatasetError> {
    if cursor.pos != cursor.bytes.len() {
        return Err(DatasetError::Integrity {
            path: path.to_path_buf(),
            reason: format!("{} bytes after the last declared record", cursor.bytes.len() - cursor.pos),
        });
    }
    Ok(())
}

pub fn decode_samples(
    path: &Path,
    bytes: &[u8],
    pa_count: usize,
) -> std::result::Result<Vec<CeSample>, DatasetError> {
    let count = read_header(path, bytes, DATASET_MAGIC, "RWCE")?;
    let mut cur = Cursor { path, bytes, pos: HEADER_LEN, record: 0 };
    // Every record needs at least its fixed part; reject absurd counts before allocating.
    let min_record = 8 + 8 * pa_count as u64;
    if count.saturating_mul(min_record) > (bytes.len() - HEADER_LEN) as u64 {
        let fit = (bytes.len() - HEADER_LEN) as u64 / min_record.max(1);
        return Err(DatasetError::Truncated { path: path.to_path_buf(), record: fit });
    }
    let mut samples = Vec::with_capacity(count as usize);
    for record in 0..count {
        cur.record = record;
        let snr_db = cur.f32()?;
        let t = cur.u32()? as usize;
        let remaining = (bytes.len() - cur.pos) / 12;
        if t > remaining {
            return Err(DatasetError::Truncated { path: path.to_path_buf(), record });
        }
        let mut pilots = Vec::with_capacity(t);
        for _ in 0..t {
            let pa_index = cur.u32()?;
            if pa_index as usize >= pa_count {
                return Err(DatasetError::Integrity {
                    path: path.to_path_buf(),
                    reason: format!("record {record}: PA index {pa_index} out of range"),
                });
            }
            pilots.push(Pilot { pa_index, observation: cur.complex()? });
        }
        let label = (0..pa_count).map(|_| cur.complex()).collect::<std::result::Result<_, _>>()?;
        samples.push(CeSample { snr_db, pilots, label });
    }
    trailing(path, &cur)?;
    Ok(samples)
}

pub fn decode_predictions(
    path: &Path,
    bytes: &[u8],
    pa_count: usize,
) -> std::result::Result<Vec<Vec<Complex32>>, DatasetError> {
    let count = read_header(path, bytes, PREDICTION_MAGIC, "RWPR")?;
    let record_len = 8 * pa_count as u64;
    if count.saturating_mul(record_len) > (bytes.len() - HEADER_LEN) as u64 {
        let fit = (bytes.len() - HEADER_LEN) as u64 / record_len.max(1);
        return Err(DatasetError::Truncated { path: path.to_path_buf(), record: fit });
    }
    let mut cur = Cursor { path, bytes, pos: HEADER_LEN, record: 0 };
    let mut out = Vec::with_capacity(count as usize);
    for record in 0..count {
        cur.record = record;
        out.push((0..pa_count).map(|_| cur.complex()).collect::<std::result::Result<_, _>>()?);
    }
    trailing(path, &cur)?;
    Ok(out)
}

/// Reads a prediction file that must hold exactly `expected` samples.
pub fn read_predictions(path: &Path, expected: usize, pa_count: usize) -> Result<Vec<Vec<Complex32>>> {
    let bytes = fs::read(path).map_err(|source| DatasetError::Io { path: path.to_path_buf(), source })?;
    let found = read_header(path, &bytes, PREDICTION_MAGIC, "RWPR")?;
    if found != expected as u64 {
        return Err(DatasetError::CountMismatch { path: path.to_path_buf(), expected: expected as u64, found }.into());
    }
    Ok(decode_predictions(path, &bytes, pa_count)?)
}

pub fn write_predictions(path: &Path, predictions: &[Vec<Complex32>]) -> Result<()> {
    write_atomic(path, &encode_predictions(predictions))
}

/// All-zero predictions for `count` samples; scores 0 dB everywhere.
pub fn write_zero_predictions(path: &Path, count: usize, pa_count: usize) -> Result<()> {
    write_predictions(path, &vec![vec![Complex32::new(0.0, 0.0); pa_count]; count])
}

/// Writes one split file and records it in `manifest`.
pub fn write_split(dir: &Path, manifest: &mut Manifest, split: Split, samples: &[CeSample]) -> Result<()> {
    let history = samples.first().map_or(manifest.scenario.history, CeSample::history);
    if samples.iter().any(|s| s.history() != history || s.label.len() != manifest.pa_count()) {
        return Err(Error::Config("samples in one split must share T and PA count".into()));
    }
    let bytes = encode_samples(samples);
    let file = split_file_name(split);
    write_atomic(&dir.join(&file), &bytes)?;
    manifest.splits.insert(
        split.name().into(),
        SplitEntry { file, count: samples.len() as u64, history, sha256: sha256_hex(&bytes) },
    );
    Ok(())
}

/// Locates a dataset given either its directory or one of its split files.
/// Returns the directory and the split named by the file, if any.
pub fn resolve(path: &Path) -> Result<(PathBuf, Option<Split>)> {
    if path.is_dir() {
        return Ok((path.to_path_buf(), None));
    }
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let manifest = Manifest::read(dir)?;
    let name = path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let split = manifest
        .splits
        .iter()
        .find(|(_, e)| e.file == name)
        .and_then(|(k, _)| Split::from_name(k))
        .ok_or_else(|| DatasetError::Integrity {
            path: path.to_path_buf(),
            reason: "file is not listed in the manifest".into(),
        })?;
    Ok((dir.to_path_buf(), Some(split)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(t: usize, pa_count: usize, seed: f32) -> CeSample {
        CeSample {
            snr_db: 3.5 + seed,
            pilots: (0..t)
                .map(|i| Pilot {
                    pa_index: (i % pa_count) as u32,
                    observation: Complex32::new(i as f32 + seed, -(i as f32)),
                })
                .collect(),
            label: (0..pa_count).map(|i| Complex32::new(seed, i as f32 * 0.5)).collect(),
        }
    }

    #[test]
    fn encoded_layout_matches_format() {
        let bytes = encode_samples(&[sample(2, 3, 1.0)]);
        assert_eq!(&bytes[..4], b"RWCE");
        assert_eq!(u32::from_le_bytes(bytes[4..8].try_into().unwrap()), 1);
        assert_eq!(u64::from_le_bytes(bytes[8..16].try_into().unwrap()), 1);
        assert_eq!(f32::from_le_bytes(bytes[16..20].try_into().unwrap()), 4.5);
        assert_eq!(u32::from_le_bytes(bytes[20..24].try_into().unwrap()), 2);
        assert_eq!(bytes.len(), 16 + 8 + 2 * 12 + 3 * 8);
    }

    #[test]
    fn samples_round_trip() {
        let samples: Vec<_> = (0..5).map(|i| sample(4, 16, i as f32)).collect();
        let bytes = encode_samples(&samples);
        let back = decode_samples(Path::new("x"), &bytes, 16).unwrap();
        assert_eq!(back, samples);
        assert_eq!(encode_samples(&back), bytes);
    }

    #[test]
    fn predictions_round_trip() {
        let preds = vec![vec![Complex32::new(1.0, -2.0); 16]; 3];
        let bytes = encode_predictions(&preds);
        assert_eq!(&bytes[..4], b"RWPR");
        assert_eq!(decode_predictions(Path::new("p"), &bytes, 16).unwrap(), preds);
    }

    #[test]
    fn truncation_names_record() {
        let samples: Vec<_> = (0..3).map(|i| sample(4, 16, i as f32)).collect();
        let bytes = encode_samples(&samples);
        let err = decode_samples(Path::new("x"), &bytes[..bytes.len() - 1], 16).unwrap_err();
        assert!(matches!(err, DatasetError::Truncated { record: 2, .. }), "{err}");
    }

    #[test]
    fn bad_magic_and_version() {
        let mut bytes = encode_samples(&[sample(1, 16, 0.0)]);
        bytes[0] = b'X';
        assert!(matches!(decode_samples(Path::new("x"), &bytes, 16), Err(DatasetError::Format { .. })));
        bytes[0] = b'R';
        bytes[4] = 9;
        assert!(matches!(
            decode_samples(Path::new("x"), &bytes, 16),
            Err(DatasetError::Version { found: 9, .. })
        ));
        let preds = encode_predictions(&[vec![Complex32::new(0.0, 0.0); 16]]);
        assert!(matches!(decode_samples(Path::new("x"), &preds, 16), Err(DatasetError::Format { .. })));
    }

    #[test]
    fn out_of_range_pa_rejected() {
        let mut s = sample(2, 16, 0.0);
        s.pilots[1].pa_index = 16;
        let bytes = encode_samples(&[s]);
        assert!(matches!(decode_samples(Path::new("x"), &bytes, 16), Err(DatasetError::Integrity { .. })));
    }

    #[test]
    fn trailing_bytes_rejected() {
        let mut bytes = encode_predictions(&[vec![Complex32::new(0.0, 0.0); 16]]);
        bytes.push(0);
        assert!(matches!(decode_predictions(Path::new("p"), &bytes, 16), Err(DatasetError::Integrity { .. })));
    }

    #[test]
    fn sha256_known_vector() {
        assert_eq!(
            sha256_hex(b"abc"),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"
        );
    }
}
