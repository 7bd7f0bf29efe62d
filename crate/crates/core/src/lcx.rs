//! Leaky coaxial cable with periodic radiating slots.
//!
//! Every fed cable radiates its full feed power through its slots. The share
//! of slot `m` follows the guided attenuation profile `10^(-α ℓ_m / 10)`,
//! renormalized so the shares sum to the feed power. Slot fields add
//! coherently within one feed; separate feeds add in power.

use alloc::vec::Vec;

use crate::corridor::{amplitude, defaults, phasor, slant_distance, CorridorGeometry, RadioConfig};
use crate::error::{Error, Result};
use crate::pass::centered_grid;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LcxParams {
    pub slot_pitch: f64,
    /// One-way guided power attenuation in dB per metre.
    pub attenuation_db_per_m: f64,
    pub epsilon_r: f64,
}

impl LcxParams {
    pub fn new(slot_pitch: f64, attenuation_db_per_100m: f64, epsilon_r: f64) -> Result<Self> {
        let p = LcxParams {
            slot_pitch,
            attenuation_db_per_m: attenuation_db_per_100m / 100.0,
            epsilon_r,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn attenuation_db_per_100m(&self) -> f64 {
        self.attenuation_db_per_m * 100.0
    }

    fn validate(&self) -> Result<()> {
        if !(self.slot_pitch > 0.0 && self.slot_pitch.is_finite()) {
            return Err(Error::config(alloc::format!(
                "slot pitch must be positive, got {}",
                self.slot_pitch
            )));
        }
        if !(self.attenuation_db_per_m >= 0.0 && self.attenuation_db_per_m.is_finite()) {
            return Err(Error::config("cable attenuation must be non-negative"));
        }
        if !(self.epsilon_r >= 1.0 && self.epsilon_r.is_finite()) {
            return Err(Error::config(alloc::format!(
                "relative permittivity must be at least 1, got {}",
                self.epsilon_r
            )));
        }
        Ok(())
    }
}

impl Default for LcxParams {
    fn default() -> Self {
        LcxParams {
            slot_pitch: defaults::LCX_SLOT_PITCH_M,
            attenuation_db_per_m: defaults::LCX_ATTENUATION_DB_PER_100M / 100.0,
            epsilon_r: defaults::LCX_EPSILON_R,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum FeedMode {
    Single,
    Double,
    Segmented(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeedDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Slot {
    pub x: f64,
    /// Guided distance from the feed point.
    pub guided: f64,
    /// Field weight in sqrt-watts; `weight²` is the slot's radiated power.
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcxCable {
    slots: Vec<Slot>,
    feed_origin: f64,
    direction: FeedDirection,
    feed_power: f64,
    epsilon_r: f64,
    height: f64,
}

impl LcxCable {
    /// Cable over `[start, end]` fed at `start` (forward) or `end` (backward).
    pub fn new(
        start: f64,
        end: f64,
        direction: FeedDirection,
        feed_power: f64,
        params: &LcxParams,
        height: f64,
    ) -> Result<Self> {
        params.validate()?;
        if !(feed_power >= 0.0 && feed_power.is_finite()) {
            return Err(Error::config("feed power must be non-negative"));
        }
        let xs = centered_grid(start, end, params.slot_pitch)?;
        if xs.is_empty() {
            return Err(Error::config("cable span holds no slots"));
        }
        let feed_origin = match direction {
            FeedDirection::Forward => start,
            FeedDirection::Backward => end,
        };
        let mut slots: Vec<Slot> = xs
            .into_iter()
            .map(|x| {
                let guided = (x - feed_origin).abs();
                let share = libm::pow(10.0, -params.attenuation_db_per_m * guided / 10.0);
                Slot { x, guided, weight: share }
            })
            .collect();
        let total: f64 = slots.iter().map(|s| s.weight).sum();
        for s in &mut slots {
            s.weight = libm::sqrt(feed_power * s.weight / total);
        }
        Ok(LcxCable {
            slots,
            feed_origin,
            direction,
            feed_power,
            epsilon_r: params.epsilon_r,
            height,
        })
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn feed_origin(&self) -> f64 {
        self.feed_origin
    }

    pub fn direction(&self) -> FeedDirection {
        self.direction
    }

    pub fn feed_power(&self) -> f64 {
        self.feed_power
    }

    pub fn epsilon_r(&self) -> f64 {
        self.epsilon_r
    }

    /// Copy of the cable with every slot weight multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut out = self.clone();
        for s in &mut out.slots {
            s.weight *= factor;
        }
        out.feed_power *= factor * factor;
        out
    }

    /// Power received at `x_user` from this feed.
    pub fn power_at_user(&self, x_user: f64, wavelength: f64) -> f64 {
        let guided_index = libm::sqrt(self.epsilon_r);
        let (mut re, mut im) = (0.0, 0.0);
        for s in &self.slots {
            let d = slant_distance(x_user, s.x, self.height);
            let mag = s.weight * amplitude(d, wavelength);
            let (c, q) = phasor((d + guided_index * s.guided) / wavelength);
            re += mag * c;
            im += mag * q;
        }
        re * re + im * im
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LcxDeployment {
    mode: FeedMode,
    cables: Vec<LcxCable>,
}

impl LcxDeployment {
    pub fn build(
        mode: FeedMode,
        geometry: &CorridorGeometry,
        radio: &RadioConfig,
        params: &LcxParams,
    ) -> Result<Self> {
        let l = geometry.length();
        let h = geometry.height();
        let p = radio.transmit_power();
        let cables = match mode {
            FeedMode::Single => {
                alloc::vec![LcxCable::new(0.0, l, FeedDirection::Forward, p, params, h)?]
            }
            FeedMode::Double => alloc::vec![
                LcxCable::new(0.0, l, FeedDirection::Forward, p / 2.0, params, h)?,
                LcxCable::new(0.0, l, FeedDirection::Backward, p / 2.0, params, h)?,
            ],
            FeedMode::Segmented(0) => {
                return Err(Error::config("segmented cable needs at least one segment"))
            }
            FeedMode::Segmented(s) => {
                let n = s as f64;
                (0..s)
                    .map(|k| {
                        let start = k as f64 * l / n;
                        let end = (k + 1) as f64 * l / n;
                        LcxCable::new(start, end, FeedDirection::Forward, p / n, params, h)
                    })
                    .collect::<Result<Vec<_>>>()?
            }
        };
        Ok(LcxDeployment { mode, cables })
    }

    pub fn from_cables(mode: FeedMode, cables: Vec<LcxCable>) -> Self {
        LcxDeployment { mode, cables }
    }

    pub fn mode(&self) -> FeedMode {
        self.mode
    }

    pub fn cables(&self) -> &[LcxCable] {
        &self.cables
    }

    pub fn received_power(&self, x_user: f64, wavelength: f64) -> f64 {
        self.cables.iter().map(|c| c.power_at_user(x_user, wavelength)).sum()
    }

    pub fn snr(&self, x_user: f64, radio: &RadioConfig) -> f64 {
        self.received_power(x_user, radio.wavelength()) / radio.noise_power()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup(l: f64) -> (CorridorGeometry, RadioConfig) {
        (CorridorGeometry::with_length(l).unwrap(), RadioConfig::default())
    }

    #[test]
    fn slot_count_and_pitch() {
        let (g, r) = setup(50.0);
        let d = LcxDeployment::build(FeedMode::Single, &g, &r, &LcxParams::default()).unwrap();
        let slots = d.cables()[0].slots();
        assert_eq!(slots.len(), 625);
        assert!((slots[0].x - 0.04).abs() < 1e-12);
        for w in slots.windows(2) {
            assert!((w[1].x - w[0].x - 0.08).abs() < 1e-9);
        }
    }

    #[test]
    fn lossless_cable_is_uniform() {
        let params = LcxParams::new(0.08, 0.0, 1.26).unwrap();
        let c = LcxCable::new(0.0, 10.0, FeedDirection::Forward, 0.5, &params, 5.0).unwrap();
        let m = c.slots().len() as f64;
        for s in c.slots() {
            assert!((s.weight * s.weight - 0.5 / m).abs() < 1e-15);
        }
    }

    #[test]
    fn double_feed_power_split() {
        let (g, r) = setup(100.0);
        let d = LcxDeployment::build(FeedMode::Double, &g, &r, &LcxParams::default()).unwrap();
        assert_eq!(d.cables().len(), 2);
        for c in d.cables() {
            let dbm = crate::corridor::watts_to_dbm(c.feed_power()).unwrap();
            assert!((dbm - 6.99).abs() < 0.01);
        }
        assert_eq!(d.cables()[1].feed_origin(), 100.0);
    }

    #[test]
    fn normalization_and_monotone_weights() {
        for mode in [FeedMode::Single, FeedMode::Double, FeedMode::Segmented(4)] {
            for l in [50.0, 300.0, 1000.0] {
                let (g, r) = setup(l);
                let d = LcxDeployment::build(mode, &g, &r, &LcxParams::default()).unwrap();
                for c in d.cables() {
                    let total: f64 = c.slots().iter().map(|s| s.weight * s.weight).sum();
                    assert!(((total - c.feed_power()) / c.feed_power()).abs() < 1e-9);
                    let mut by_guided: Vec<&Slot> = c.slots().iter().collect();
                    by_guided.sort_by(|a, b| a.guided.total_cmp(&b.guided));
                    for w in by_guided.windows(2) {
                        assert!(w[1].weight < w[0].weight);
                    }
                }
            }
        }
    }

    #[test]
    fn segments_confine_slots() {
        let (g, r) = setup(200.0);
        let d = LcxDeployment::build(FeedMode::Segmented(4), &g, &r, &LcxParams::default()).unwrap();
        for (k, c) in d.cables().iter().enumerate() {
            let start = 50.0 * k as f64;
            assert_eq!(c.feed_origin(), start);
            assert!(c.slots().iter().all(|s| s.x > start && s.x < start + 50.0));
            assert!((c.feed_power() - r.transmit_power() / 4.0).abs() < 1e-18);
        }
    }

    #[test]
    fn one_slot_above_user() {
        let params = LcxParams { slot_pitch: 2.0, ..LcxParams::default() };
        let c = LcxCable::new(0.0, 2.0, FeedDirection::Forward, 0.01, &params, 5.0).unwrap();
        assert_eq!(c.slots().len(), 1);
        let lambda = RadioConfig::default().wavelength();
        let a = amplitude(5.0, lambda);
        let got = c.power_at_user(1.0, lambda);
        assert!(((got - 0.01 * a * a) / got).abs() < 1e-12);
        let scaled = c.scaled(3.0).power_at_user(1.0, lambda);
        assert!(((scaled - 9.0 * got) / scaled).abs() < 1e-12);
    }

    #[test]
    fn guided_velocity_factor() {
        assert!((libm::sqrt(1.26) - 1.1225).abs() < 1e-4);
    }

    #[test]
    fn segmented_one_is_single() {
        let (g, r) = setup(100.0);
        let p = LcxParams::default();
        let single = LcxDeployment::build(FeedMode::Single, &g, &r, &p).unwrap();
        let seg = LcxDeployment::build(FeedMode::Segmented(1), &g, &r, &p).unwrap();
        for x in [0.0, 13.0, 77.7, 100.0] {
            assert_eq!(single.snr(x, &r), seg.snr(x, &r));
        }
        assert!(LcxDeployment::build(FeedMode::Segmented(0), &g, &r, &p).is_err());
    }

    #[test]
    fn dead_feed_double_is_half_power_single() {
        let (g, r) = setup(100.0);
        let p = LcxParams::default();
        let double = LcxDeployment::build(FeedMode::Double, &g, &r, &p).unwrap();
        let dead = LcxDeployment::from_cables(
            FeedMode::Double,
            alloc::vec![double.cables()[0].clone(), double.cables()[1].scaled(0.0)],
        );
        let half = r.with_transmit_power(r.transmit_power() / 2.0).unwrap();
        let single = LcxDeployment::build(FeedMode::Single, &g, &half, &p).unwrap();
        for x in [0.0, 5.5, 50.0, 99.0] {
            let a = dead.snr(x, &r);
            let b = single.snr(x, &r);
            assert!(((a - b) / b).abs() < 1e-12);
        }
    }

    #[test]
    fn double_is_mirror_symmetric() {
        let (g, r) = setup(200.0);
        let d = LcxDeployment::build(FeedMode::Double, &g, &r, &LcxParams::default()).unwrap();
        for x in [0.0, 0.37, 12.5, 61.0, 99.9] {
            let a = d.snr(x, &r);
            let b = d.snr(200.0 - x, &r);
            assert!(((a - b) / a).abs() < 1e-6, "x = {x}: {a} vs {b}");
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let (g, r) = setup(10.0);
        assert!(LcxParams::new(0.0, 9.8, 1.26).is_err());
        assert!(LcxParams::new(0.08, -1.0, 1.26).is_err());
        assert!(LcxParams::new(0.08, 9.8, 0.5).is_err());
        let wide = LcxParams { slot_pitch: 11.0, ..LcxParams::default() };
        assert!(LcxDeployment::build(FeedMode::Single, &g, &r, &wide).is_err());
    }
}
