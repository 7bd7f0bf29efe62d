//! Rayon-backed drivers. Work is split per sample point or per record and
//! collected in index order, so every result is bit-identical to the
//! sequential functions in `railwave_core`.

use std::sync::OnceLock;

use railwave_core::ce::{generate_sample, CeSample, CeScenario, Split};
use railwave_core::sweep::{
    compare_matrix_with, power_curve_with, MatrixCell, PowerCurveRow, ScenarioSpec,
};
use railwave_core::SweepResult;
use rayon::prelude::*;
use rayon::ThreadPool;

use crate::error::Result;

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "RAILWAVE_THREADS";

fn pool() -> &'static ThreadPool {
    static POOL: OnceLock<ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = thread_cap() {
            builder = builder.num_threads(n);
        }
        builder.build().expect("thread pool")
    })
}

/// Parsed value of `RAILWAVE_THREADS`; unset, empty, zero or garbage means
/// no cap.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

pub fn install<R: Send>(f: impl FnOnce() -> R + Send) -> R {
    pool().install(f)
}

pub fn sweep(spec: &ScenarioSpec) -> Result<SweepResult> {
    let scenario = spec.build()?;
    let positions = spec.sample_positions();
    let gains: Vec<f64> =
        install(|| positions.par_iter().map(|&x| scenario.unit_gain(x)).collect());
    Ok(SweepResult::from_unit_gains(spec, &gains)?)
}

/// Evaluates every distinct scenario of a matrix or curve in parallel, then
/// replays the sequential driver against the cached values.
fn evaluate_all<F>(specs: &[ScenarioSpec], f: F) -> Result<Vec<f64>>
where
    F: Fn(&ScenarioSpec) -> Result<f64> + Sync,
{
    install(|| specs.par_iter().map(&f).collect())
}

fn replay(values: Vec<f64>) -> impl FnMut(&ScenarioSpec) -> railwave_core::Result<f64> {
    let mut it = values.into_iter();
    move |_| {
        it.next()
            .ok_or_else(|| railwave_core::Error::Integrity("scenario replay ran short".into()))
    }
}

pub fn compare_matrix(
    lengths: &[f64],
    counts: &[usize],
    template: &ScenarioSpec,
    pitch: f64,
) -> Result<Vec<MatrixCell>> {
    let mut specs = Vec::new();
    compare_matrix_with(lengths, counts, template, pitch, |s| {
        specs.push(*s);
        Ok(0.0)
    })?;
    let values = evaluate_all(&specs, |s| sweep(s).map(|r| r.average_se))?;
    Ok(compare_matrix_with(lengths, counts, template, pitch, replay(values))?)
}

pub fn power_curve(specs: &[ScenarioSpec], targets_db: &[f64]) -> Result<Vec<PowerCurveRow>> {
    let worst = evaluate_all(specs, |s| sweep(s).map(|r| r.worst_case_unit_gain))?;
    Ok(power_curve_with(specs, targets_db, replay(worst))?)
}

pub fn generate_split(
    master_seed: u64,
    split: Split,
    count: usize,
    scenario: &CeScenario,
) -> Vec<CeSample> {
    install(|| {
        (0..count as u64)
            .into_par_iter()
            .map(|i| generate_sample(master_seed, split, i, scenario))
            .collect()
    })
}

