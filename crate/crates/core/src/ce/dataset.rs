//! In-memory benchmark samples, per-sample seeding and scoring.
//!
//! Sample `i` of split `s` draws from a ChaCha8 stream keyed by the master
//! seed with stream id `(s << 48) | i`, so generation order and thread count
//! never change a sample's content.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_complex::{Complex32, Complex64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::estimate::{ls_estimate, NmseAccumulator};
use super::{draw_pilots, draw_trajectory, CeScenario};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum Split {
    Train,
    Validation,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Validation, Split::Test];

    pub fn name(&self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Validation => "validation",
            Split::Test => "test",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        match name {
            "train" => Some(Split::Train),
            "validation" | "val" => Some(Split::Validation),
            "test" => Some(Split::Test),
            _ => None,
        }
    }

    pub fn default_count(&self) -> usize {
        match self {
            Split::Train => 70_000,
            Split::Validation => 30_000,
            Split::Test => 10_000,
        }
    }

    fn stream_tag(&self) -> u64 {
        match self {
            Split::Train => 1,
            Split::Validation => 2,
            Split::Test => 3,
        }
    }
}

/// One pilot as stored on disk: the sounded PA and its observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pilot {
    pub pa_index: u32,
    pub observation: Complex32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CeSample {
    pub snr_db: f32,
    /// Oldest first.
    pub pilots: Vec<Pilot>,
    /// Normalized CSI at the last pilot instant.
    pub label: Vec<Complex32>,
}

impl CeSample {
    pub fn history(&self) -> usize {
        self.pilots.len()
    }

    pub fn label_f64(&self) -> Vec<Complex64> {
        self.label.iter().map(|c| widen(*c)).collect()
    }

    /// LS estimate from the `history` most recent pilots (all when `None`).
    pub fn ls_estimate(&self, pa_count: usize, history: Option<usize>) -> Vec<Complex64> {
        let skip = history.map_or(0, |t| self.pilots.len().saturating_sub(t));
        ls_estimate(
            self.pilots[skip..].iter().map(|p| (p.pa_index as usize, widen(p.observation))),
            pa_count,
        )
        .csi
    }
}

fn widen(c: Complex32) -> Complex64 {
    Complex64::new(c.re as f64, c.im as f64)
}

fn narrow(c: Complex64) -> Complex32 {
    Complex32::new(c.re as f32, c.im as f32)
}

pub fn sample_rng(master_seed: u64, split: Split, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream((split.stream_tag() << 48) | index);
    rng
}

pub fn generate_sample(master_seed: u64, split: Split, index: u64, scenario: &CeScenario) -> CeSample {
    let mut rng = sample_rng(master_seed, split, index);
    let p = scenario.params();
    let snr_db = if p.snr_max_db > p.snr_min_db {
        rng.random_range(p.snr_min_db..=p.snr_max_db)
    } else {
        p.snr_min_db
    };
    let trajectory = draw_trajectory(&mut rng, scenario);
    let records = draw_pilots(&mut rng, &trajectory, scenario, snr_db);
    let last = trajectory.last().map_or(0.0, |pt| pt.x);
    CeSample {
        snr_db: snr_db as f32,
        pilots: records
            .iter()
            .map(|r| Pilot { pa_index: r.active_pa as u32, observation: narrow(r.observation) })
            .collect(),
        label: scenario.true_channel(last).into_iter().map(narrow).collect(),
    }
}

pub fn generate_split(
    master_seed: u64,
    split: Split,
    count: usize,
    scenario: &CeScenario,
) -> Vec<CeSample> {
    (0..count as u64).map(|i| generate_sample(master_seed, split, i, scenario)).collect()
}

/// Integer-dB bucket a sample is reported under.
pub fn snr_bucket(snr_db: f32) -> i32 {
    libm::round(snr_db as f64) as i32
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScoreRow {
    pub t: usize,
    pub snr_bucket_db: i32,
    pub nmse_db: f64,
    pub baseline_ls_nmse_db: f64,
    pub count: usize,
}

/// NMSE of `predictions` per `(T, SNR bucket)` next to the LS baseline on
/// the same samples.
pub fn score(
    samples: &[CeSample],
    predictions: &[Vec<Complex32>],
    pa_count: usize,
) -> Result<Vec<ScoreRow>> {
    if samples.len() != predictions.len() {
        return Err(Error::Integrity(alloc::format!(
            "{} predictions for {} samples",
            predictions.len(),
            samples.len()
        )));
    }
    let mut buckets: BTreeMap<(usize, i32), (NmseAccumulator, NmseAccumulator)> = BTreeMap::new();
    for (i, (sample, pred)) in samples.iter().zip(predictions).enumerate() {
        if pred.len() != pa_count || sample.label.len() != pa_count {
            return Err(Error::Integrity(alloc::format!(
                "sample {i}: expected {pa_count} CSI entries"
            )));
        }
        let truth = sample.label_f64();
        let pred: Vec<Complex64> = pred.iter().map(|c| widen(*c)).collect();
        let ls = sample.ls_estimate(pa_count, None);
        let entry = buckets.entry((sample.history(), snr_bucket(sample.snr_db))).or_default();
        entry.0.push(&pred, &truth)?;
        entry.1.push(&ls, &truth)?;
    }
    Ok(buckets
        .into_iter()
        .map(|((t, b), (p, ls))| ScoreRow {
            t,
            snr_bucket_db: b,
            nmse_db: p.db().unwrap_or(f64::NAN),
            baseline_ls_nmse_db: ls.db().unwrap_or(f64::NAN),
            count: p.count(),
        })
        .collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LsRow {
    pub t: usize,
    pub snr_bucket_db: i32,
    pub nmse_db: f64,
    pub count: usize,
}

/// LS NMSE per SNR bucket using the `history` most recent pilots of each sample.
pub fn ls_report(samples: &[CeSample], pa_count: usize, history: Option<usize>) -> Result<Vec<LsRow>> {
    let mut buckets: BTreeMap<(usize, i32), NmseAccumulator> = BTreeMap::new();
    for sample in samples {
        let t = history.map_or(sample.history(), |h| h.min(sample.history()));
        let est = sample.ls_estimate(pa_count, Some(t));
        buckets
            .entry((t, snr_bucket(sample.snr_db)))
            .or_default()
            .push(&est, &sample.label_f64())?;
    }
    Ok(buckets
        .into_iter()
        .map(|((t, b), acc)| LsRow {
            t,
            snr_bucket_db: b,
            nmse_db: acc.db().unwrap_or(f64::NAN),
            count: acc.count(),
        })
        .collect())
}
