//! Pinching-antenna arrays on a single dielectric waveguide.
//!
//! Each pinching antenna (PA) at `x_n` radiates
//! `sqrt(η) · λ/(4π d_n) · exp(-j2π d_n/λ) · exp(-j2π n_eff x_n/λ)` toward the
//! user, where the second phase term is the in-guide delay from the feed at
//! `x = 0`. Activated PAs share the transmit power equally and their fields
//! add coherently at the receiver.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::corridor::{amplitude, phasor, slant_distance, CorridorGeometry, RadioConfig};
use crate::error::{Error, Result};

/// Largest array accepted by [`PassArray::best_subset_oracle`].
pub const ORACLE_MAX_PAS: usize = 20;

const PITCH_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct PassParams {
    /// Fraction of the guided power each PA radiates.
    pub eta: f64,
    /// Effective refractive index of the waveguide.
    pub n_eff: f64,
}

impl Default for PassParams {
    fn default() -> Self {
        PassParams {
            eta: crate::corridor::defaults::PA_ETA,
            n_eff: crate::corridor::defaults::PA_N_EFF,
        }
    }
}

impl PassParams {
    pub(crate) fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0 && self.eta <= 1.0) {
            return Err(Error::config(alloc::format!("eta must lie in (0, 1], got {}", self.eta)));
        }
        // n_eff = 0 is accepted so the in-guide phase ramp can be switched off.
        if !(self.n_eff == 0.0 || self.n_eff >= 1.0) || !self.n_eff.is_finite() {
            return Err(Error::config(alloc::format!(
                "n_eff must be 0 or at least 1, got {}",
                self.n_eff
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PassArray {
    positions: Vec<f64>,
    params: PassParams,
    geometry: CorridorGeometry,
}

impl PassArray {
    /// `count` PAs on the centered grid `x_n = (2n - 1) L / (2 count)`.
    pub fn equidistant(count: usize, geometry: CorridorGeometry, params: PassParams) -> Result<Self> {
        if count == 0 {
            return Err(Error::config("equidistant array needs at least one PA"));
        }
        let l = geometry.length();
        let n = count as f64;
        let positions = (1..=count).map(|i| (2.0 * i as f64 - 1.0) * l / (2.0 * n)).collect();
        Self::from_positions(positions, geometry, params)
    }

    /// PAs every `pitch` metres starting at `pitch / 2`, as many as fit before `L - pitch / 2`.
    pub fn pitched(pitch: f64, geometry: CorridorGeometry, params: PassParams) -> Result<Self> {
        let positions = centered_grid(0.0, geometry.length(), pitch)?;
        Self::from_positions(positions, geometry, params)
    }

    pub fn from_positions(
        positions: Vec<f64>,
        geometry: CorridorGeometry,
        params: PassParams,
    ) -> Result<Self> {
        params.validate()?;
        if positions.is_empty() {
            return Err(Error::config("PA array is empty"));
        }
        let l = geometry.length();
        if positions.iter().any(|&x| !(0.0..=l).contains(&x)) {
            return Err(Error::config("PA position outside the corridor"));
        }
        if positions.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("PA positions must be strictly increasing"));
        }
        Ok(PassArray { positions, params, geometry })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn params(&self) -> PassParams {
        self.params
    }

    pub fn geometry(&self) -> CorridorGeometry {
        self.geometry
    }

    /// The `count` PAs closest to `x_user`; equal distances go to the lower index.
    pub fn select_nearest(&self, x_user: f64, count: usize) -> Result<ActivationSet> {
        if count == 0 || count > self.positions.len() {
            return Err(Error::config(alloc::format!(
                "cannot activate {count} of {} PAs",
                self.positions.len()
            )));
        }
        let (lo, hi) = nearest_window(&self.positions, x_user, count);
        Ok(ActivationSet { indices: (lo..hi).collect() })
    }

    /// Complex channel coefficient of PA `index` for a user at `x_user`.
    #[inline]
    pub fn channel_entry(&self, index: usize, x_user: f64, wavelength: f64) -> Complex64 {
        let x_n = self.positions[index];
        let d = slant_distance(x_user, x_n, self.geometry.height());
        let mag = libm::sqrt(self.params.eta) * amplitude(d, wavelength);
        let (re, im) = phasor((d + self.params.n_eff * x_n) / wavelength);
        Complex64::new(mag * re, mag * im)
    }

    pub fn channel_vector(&self, x_user: f64, radio: &RadioConfig) -> Vec<Complex64> {
        let lambda = radio.wavelength();
        (0..self.positions.len()).map(|n| self.channel_entry(n, x_user, lambda)).collect()
    }

    /// `|Σ h_n|²` over the given indices.
    pub fn coherent_gain(&self, indices: &[usize], x_user: f64, wavelength: f64) -> f64 {
        indices
            .iter()
            .map(|&n| self.channel_entry(n, x_user, wavelength))
            .sum::<Complex64>()
            .norm_sqr()
    }

    /// Received power per watt of total transmit power with `active` radiating.
    pub fn unit_gain(&self, active: &ActivationSet, x_user: f64, wavelength: f64) -> f64 {
        self.coherent_gain(&active.indices, x_user, wavelength) / active.len() as f64
    }

    /// SNR with `P_t / N_act` fed to each activated PA.
    pub fn snr(&self, active: &ActivationSet, x_user: f64, radio: &RadioConfig) -> Result<f64> {
        if active.indices.is_empty() {
            return Err(Error::config("activation set is empty"));
        }
        if active.indices.iter().any(|&i| i >= self.positions.len()) {
            return Err(Error::config("activation index outside the array"));
        }
        let g = self.unit_gain(active, x_user, radio.wavelength());
        Ok(radio.transmit_power() * g / radio.noise_power())
    }

    /// Exhaustive search for the `count`-subset maximizing `|Σ h_n|²`.
    /// Ties keep the lexicographically smallest index set.
    pub fn best_subset_oracle(
        &self,
        x_user: f64,
        count: usize,
        radio: &RadioConfig,
    ) -> Result<ActivationSet> {
        let m = self.positions.len();
        if m > ORACLE_MAX_PAS {
            return Err(Error::OracleCapacity { size: m, max: ORACLE_MAX_PAS });
        }
        if count == 0 || count > m {
            return Err(Error::config(alloc::format!("cannot activate {count} of {m} PAs")));
        }
        let h = self.channel_vector(x_user, radio);
        let mut subset: Vec<usize> = (0..count).collect();
        let mut best = subset.clone();
        let mut best_gain = f64::NEG_INFINITY;
        loop {
            let gain = subset.iter().map(|&i| h[i]).sum::<Complex64>().norm_sqr();
            if gain > best_gain {
                best_gain = gain;
                best.copy_from_slice(&subset);
            }
            if !next_combination(&mut subset, m) {
                break;
            }
        }
        Ok(ActivationSet { indices: best })
    }
}

/// Advances `subset` to the next `k`-combination of `0..m` in lexicographic order.
fn next_combination(subset: &mut [usize], m: usize) -> bool {
    let k = subset.len();
    let mut i = k;
    while i > 0 {
        i -= 1;
        if subset[i] < m - k + i {
            subset[i] += 1;
            for j in i + 1..k {
                subset[j] = subset[j - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Contiguous index window `[lo, hi)` of the `count` sorted positions nearest
/// to `x`, growing toward the lower index on ties.
pub(crate) fn nearest_window(positions: &[f64], x: f64, count: usize) -> (usize, usize) {
    let split = positions.partition_point(|&p| p < x);
    let (mut lo, mut hi) = (split, split);
    while hi - lo < count {
        let take_left = match (lo > 0, hi < positions.len()) {
            (true, true) => (x - positions[lo - 1]).abs() <= (positions[hi] - x).abs(),
            (true, false) => true,
            (false, _) => false,
        };
        if take_left {
            lo -= 1;
        } else {
            hi += 1;
        }
    }
    (lo, hi)
}

/// Centered grid `start + pitch/2 + k·pitch` inside `[start, end]`.
pub(crate) fn centered_grid(start: f64, end: f64, pitch: f64) -> Result<Vec<f64>> {
    let span = end - start;
    if !(pitch > 0.0 && pitch.is_finite()) {
        return Err(Error::config(alloc::format!("pitch must be positive, got {pitch}")));
    }
    if pitch > span + PITCH_SLACK {
        return Err(Error::config(alloc::format!("pitch {pitch} m exceeds span {span} m")));
    }
    let count = libm::floor(span / pitch + PITCH_SLACK) as usize;
    Ok((0..count).map(|k| start + pitch / 2.0 + k as f64 * pitch).collect())
}

/// Indices of the radiating PAs, kept in ascending order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivationSet {
    indices: Vec<usize>,
}

impl ActivationSet {
    pub fn new(mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if indices.is_empty() {
            return Err(Error::config("activation set is empty"));
        }
        Ok(ActivationSet { indices })
    }

    pub fn all(array: &PassArray) -> Self {
        ActivationSet { indices: (0..array.len()).collect() }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Received power per watt for a single PA parked directly above the user.
pub fn movable_unit_gain(radio: &RadioConfig, geometry: &CorridorGeometry, eta: f64) -> f64 {
    let a = amplitude(geometry.height(), radio.wavelength());
    eta * a * a
}

/// SNR of the ideal tracking PA; independent of the user position.
pub fn movable_snr(radio: &RadioConfig, geometry: &CorridorGeometry, eta: f64) -> f64 {
    radio.transmit_power() * movable_unit_gain(radio, geometry, eta) / radio.noise_power()
}
