//! Channel-estimation benchmark for a moving user under a round-robin pilot
//! schedule.
//!
//! One PA is sounded per pilot instant (`active_pa = time_index mod N`).
//! Channels are scaled by a single constant so that the mean of `|h_n|²`
//! over the corridor and over all PAs is one; the pilot SNR then fixes the
//! noise variance at `10^(-SNR/10)`.

mod dataset;
mod estimate;

pub use dataset::{
    generate_sample, generate_split, ls_report, sample_rng, score, CeSample, LsRow, Pilot, ScoreRow,
    Split,
};
pub use estimate::{ls_estimate, nmse, ratio_to_db, LsEstimate, NmseAccumulator, NMSE_FLOOR_DB};

use alloc::vec::Vec;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::corridor::{db_to_linear, defaults, wavelength, CorridorGeometry};
use crate::error::{Error, Result};
use crate::pass::{PassArray, PassParams};

/// Midpoints used to average `|h_n|²` over the corridor.
const NORMALIZATION_GRID: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CeParams {
    pub length: f64,
    pub pa_count: usize,
    pub height: f64,
    pub carrier_frequency: f64,
    pub eta: f64,
    pub n_eff: f64,
    pub speed_kmh: f64,
    pub pilot_interval_s: f64,
    /// Pilots per observation window (T).
    pub history: usize,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
}

impl Default for CeParams {
    fn default() -> Self {
        CeParams {
            length: 100.0,
            pa_count: 16,
            height: defaults::HEIGHT_M,
            carrier_frequency: defaults::CARRIER_HZ,
            eta: defaults::PA_ETA,
            n_eff: defaults::PA_N_EFF,
            speed_kmh: 60.0,
            pilot_interval_s: 0.625e-3,
            history: 16,
            snr_min_db: 0.0,
            snr_max_db: 20.0,
        }
    }
}

impl CeParams {
    pub fn speed_mps(&self) -> f64 {
        self.speed_kmh / 3.6
    }

    /// Distance covered during one observation window, `v · T · Δt`.
    pub fn window_span(&self) -> f64 {
        self.speed_mps() * self.history as f64 * self.pilot_interval_s
    }
}

#[derive(Debug, Clone)]
pub struct CeScenario {
    params: CeParams,
    array: PassArray,
    wavelength: f64,
    normalization: f64,
}

impl CeScenario {
    pub fn new(params: CeParams) -> Result<Self> {
        if !(params.speed_kmh >= 0.0 && params.speed_kmh.is_finite()) {
            return Err(Error::config("speed must be non-negative"));
        }
        if !(params.pilot_interval_s > 0.0 && params.pilot_interval_s.is_finite()) {
            return Err(Error::config("pilot interval must be positive"));
        }
        if params.history == 0 {
            return Err(Error::config("observation window needs at least one pilot"));
        }
        if !(params.snr_min_db <= params.snr_max_db)
            || !params.snr_min_db.is_finite()
            || !params.snr_max_db.is_finite()
        {
            return Err(Error::config("SNR range must be a finite interval"));
        }
        let geometry = CorridorGeometry::new(params.length, defaults::WIDTH_M, params.height)?;
        if params.window_span() > params.length {
            return Err(Error::config(alloc::format!(
                "a {:.3} m observation window does not fit in a {} m corridor",
                params.window_span(),
                params.length
            )));
        }
        let array = PassArray::equidistant(
            params.pa_count,
            geometry,
            PassParams { eta: params.eta, n_eff: params.n_eff },
        )?;
        let wavelength = wavelength(params.carrier_frequency)?;
        let mut scenario = CeScenario { params, array, wavelength, normalization: 1.0 };
        scenario.normalization = scenario.ensemble_power();
        Ok(scenario)
    }

    /// Mean of the raw `|h_n(x)|²` over `x` uniform on the corridor and all `n`.
    fn ensemble_power(&self) -> f64 {
        let l = self.params.length;
        let k = NORMALIZATION_GRID as f64;
        let mut acc = Vec::with_capacity(NORMALIZATION_GRID);
        for i in 0..NORMALIZATION_GRID {
            let x = (i as f64 + 0.5) * l / k;
            let row: f64 = (0..self.array.len())
                .map(|n| self.array.channel_entry(n, x, self.wavelength).norm_sqr())
                .sum();
            acc.push(row / self.array.len() as f64);
        }
        crate::sweep::pairwise_sum(&acc) / k
    }

    pub fn params(&self) -> &CeParams {
        &self.params
    }

    pub fn array(&self) -> &PassArray {
        &self.array
    }

    pub fn pa_count(&self) -> usize {
        self.array.len()
    }

    /// Raw ensemble power the channels are divided by.
    pub fn normalization_constant(&self) -> f64 {
        self.normalization
    }

    pub fn true_entry(&self, index: usize, x_user: f64) -> Complex64 {
        self.array.channel_entry(index, x_user, self.wavelength) / libm::sqrt(self.normalization)
    }

    /// Normalized CSI vector at `x_user`.
    pub fn true_channel(&self, x_user: f64) -> Vec<Complex64> {
        (0..self.pa_count()).map(|n| self.true_entry(n, x_user)).collect()
    }

    pub fn active_pa(&self, time_index: u64) -> usize {
        (time_index % self.pa_count() as u64) as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub time_index: u64,
    pub x: f64,
}

/// User positions over one observation window, drawn from `seed`.
pub fn gen_trajectory(seed: u64, scenario: &CeScenario) -> Vec<TrajectoryPoint> {
    draw_trajectory(&mut ChaCha8Rng::seed_from_u64(seed), scenario)
}

/// Start position uniform on `[0, L - v T Δt]`, rightward motion at constant
/// speed. The window starts at a uniformly drawn phase of the pilot schedule.
pub(crate) fn draw_trajectory<R: Rng>(rng: &mut R, scenario: &CeScenario) -> Vec<TrajectoryPoint> {
    let p = &scenario.params;
    let max_start = p.length - p.window_span();
    let x0 = if max_start > 0.0 { rng.random_range(0.0..=max_start) } else { 0.0 };
    let phase = rng.random_range(0..scenario.pa_count() as u64);
    let step = p.speed_mps() * p.pilot_interval_s;
    (0..p.history)
        .map(|t| TrajectoryPoint { time_index: phase + t as u64, x: x0 + step * t as f64 })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PilotRecord {
    pub time_index: u64,
    pub active_pa: usize,
    pub observation: Complex64,
    pub snr_db: f64,
    /// Ground truth, not part of any estimator input.
    pub x_user: f64,
}

/// Noise variance for a pilot SNR; `+inf` dB gives noiseless pilots.
pub fn noise_variance(snr_db: f64) -> f64 {
    if snr_db == f64::INFINITY {
        0.0
    } else {
        1.0 / db_to_linear(snr_db)
    }
}

pub fn simulate_pilots(
    trajectory: &[TrajectoryPoint],
    scenario: &CeScenario,
    snr_db: f64,
    noise_seed: u64,
) -> Vec<PilotRecord> {
    draw_pilots(&mut ChaCha8Rng::seed_from_u64(noise_seed), trajectory, scenario, snr_db)
}

pub(crate) fn draw_pilots<R: Rng>(
    rng: &mut R,
    trajectory: &[TrajectoryPoint],
    scenario: &CeScenario,
    snr_db: f64,
) -> Vec<PilotRecord> {
    let sigma = libm::sqrt(noise_variance(snr_db) / 2.0);
    trajectory
        .iter()
        .map(|pt| {
            let active_pa = scenario.active_pa(pt.time_index);
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            let noise = Complex64::new(sigma * re, sigma * im);
            PilotRecord {
                time_index: pt.time_index,
                active_pa,
                observation: scenario.true_entry(active_pa, pt.x) + noise,
                snr_db,
                x_user: pt.x,
            }
        })
        .collect()
}
