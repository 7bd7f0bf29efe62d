//! Corridor geometry, unit conversions and the free-space primitive shared by
//! both radiating architectures.
//!
//! The radiating line (cable or waveguide) runs from `(0, Dy/2, Dz)` to
//! `(L, Dy/2, Dz)`. The user moves along `(0, Dy/2, 0)` to `(L, Dy/2, 0)`,
//! directly beneath it, so only the longitudinal offset and the mounting
//! height enter the distance.

use core::f64::consts::PI;

use crate::error::{Error, Result};

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Reference values used whenever a caller does not override them.
pub mod defaults {
    pub const CARRIER_HZ: f64 = 28e9;
    pub const NOISE_DBM: f64 = -120.0;
    pub const TRANSMIT_DBM: f64 = 10.0;
    pub const WIDTH_M: f64 = 20.0;
    pub const HEIGHT_M: f64 = 5.0;
    pub const PA_PITCH_M: f64 = 1.2195;
    pub const PA_ETA: f64 = 0.95;
    pub const PA_N_EFF: f64 = 1.4;
    pub const LCX_SLOT_PITCH_M: f64 = 0.08;
    pub const LCX_ATTENUATION_DB_PER_100M: f64 = 9.8;
    pub const LCX_EPSILON_R: f64 = 1.26;
    pub const SAMPLE_COUNT: usize = 10_000;
    pub const LENGTHS_M: [f64; 6] = [50.0, 100.0, 200.0, 300.0, 500.0, 1000.0];
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CorridorGeometry {
    length: f64,
    width: f64,
    height: f64,
}

impl CorridorGeometry {
    pub fn new(length: f64, width: f64, height: f64) -> Result<Self> {
        for (name, v) in [("length", length), ("width", width), ("height", height)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(alloc::format!(
                    "corridor {name} must be positive and finite, got {v}"
                )));
            }
        }
        Ok(CorridorGeometry { length, width, height })
    }

    /// Corridor of the given length with the reference cross-section.
    pub fn with_length(length: f64) -> Result<Self> {
        Self::new(length, defaults::WIDTH_M, defaults::HEIGHT_M)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn height(&self) -> f64 {
        self.height
    }

    /// Distance between a user at `x_user` and a radiator at `x_radiator`.
    #[inline]
    pub fn slant_distance(&self, x_user: f64, x_radiator: f64) -> f64 {
        slant_distance(x_user, x_radiator, self.height)
    }
}

#[inline]
pub(crate) fn slant_distance(x_user: f64, x_radiator: f64, height: f64) -> f64 {
    let dx = x_user - x_radiator;
    libm::sqrt(dx * dx + height * height)
}

/// Carrier, noise and transmit power. Powers are held in watts.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RadioConfig {
    carrier_frequency: f64,
    noise_power: f64,
    transmit_power: f64,
}

impl RadioConfig {
    pub fn new(carrier_frequency: f64, noise_power: f64, transmit_power: f64) -> Result<Self> {
        wavelength(carrier_frequency)?;
        if !(noise_power.is_finite() && noise_power > 0.0) {
            return Err(Error::config(alloc::format!(
                "noise power must be positive, got {noise_power} W"
            )));
        }
        if !(transmit_power.is_finite() && transmit_power >= 0.0) {
            return Err(Error::config(alloc::format!(
                "transmit power must be non-negative, got {transmit_power} W"
            )));
        }
        Ok(RadioConfig { carrier_frequency, noise_power, transmit_power })
    }

    pub fn from_dbm(carrier_frequency: f64, noise_dbm: f64, transmit_dbm: f64) -> Result<Self> {
        Self::new(carrier_frequency, dbm_to_watts(noise_dbm), dbm_to_watts(transmit_dbm))
    }

    pub fn carrier_frequency(&self) -> f64 {
        self.carrier_frequency
    }

    pub fn wavelength(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_frequency
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    pub fn transmit_power(&self) -> f64 {
        self.transmit_power
    }

    pub fn with_transmit_power(mut self, watts: f64) -> Result<Self> {
        if !(watts.is_finite() && watts >= 0.0) {
            return Err(Error::config(alloc::format!(
                "transmit power must be non-negative, got {watts} W"
            )));
        }
        self.transmit_power = watts;
        Ok(self)
    }
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            carrier_frequency: defaults::CARRIER_HZ,
            noise_power: dbm_to_watts(defaults::NOISE_DBM),
            transmit_power: dbm_to_watts(defaults::TRANSMIT_DBM),
        }
    }
}

pub fn wavelength(frequency: f64) -> Result<f64> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::config(alloc::format!(
            "carrier frequency must be positive, got {frequency} Hz"
        )));
    }
    Ok(SPEED_OF_LIGHT / frequency)
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    libm::pow(10.0, (dbm - 30.0) / 10.0)
}

pub fn watts_to_dbm(watts: f64) -> Result<f64> {
    if !(watts > 0.0) {
        return Err(Error::domain(alloc::format!("cannot express {watts} W in dBm")));
    }
    Ok(10.0 * libm::log10(watts) + 30.0)
}

pub fn db_to_linear(db: f64) -> f64 {
    libm::pow(10.0, db / 10.0)
}

/// Linear power ratio in dB; zero maps to negative infinity.
pub fn linear_to_db(ratio: f64) -> f64 {
    10.0 * libm::log10(ratio)
}

/// Spectral efficiency `log2(1 + snr)` in bps/Hz.
#[inline]
pub fn spectral_efficiency(snr: f64) -> f64 {
    libm::log2(1.0 + snr)
}

/// Free-space amplitude `λ / (4π d)`; its square is the free-space power gain.
pub fn free_space_amplitude(distance: f64, wavelength: f64) -> Result<f64> {
    if distance == 0.0 {
        return Err(Error::Singularity);
    }
    if !(distance > 0.0 && wavelength > 0.0) {
        return Err(Error::domain(alloc::format!(
            "distance and wavelength must be positive, got d = {distance}, λ = {wavelength}"
        )));
    }
    Ok(amplitude(distance, wavelength))
}

#[inline]
pub(crate) fn amplitude(distance: f64, wavelength: f64) -> f64 {
    wavelength / (4.0 * PI * distance)
}

/// Unit phasor `exp(-j 2π cycles)`. The integer part of `cycles` is dropped
/// before scaling so long guided paths keep full phase precision.
#[inline]
pub(crate) fn phasor(cycles: f64) -> (f64, f64) {
    let frac = cycles - libm::floor(cycles);
    let (s, c) = libm::sincos(2.0 * PI * frac);
    (c, -s)
}
