//! Run configuration. Every field has a default matching the reference
//! setup; a TOML file may override any subset, and command-line flags
//! override the file.
//!
//! ```toml
//! seed = 7
//!
//! [radio]
//! carrier_hz = 28e9
//! noise_dbm = -120.0
//! power_dbm = 10.0
//!
//! [corridor]
//! length_m = 100.0
//! width_m = 20.0
//! height_m = 5.0
//! samples = 10000
//!
//! [pass]
//! eta = 0.95
//! n_eff = 1.4
//! pitch_m = 1.2195
//!
//! [lcx]
//! slot_pitch_m = 0.08
//! attenuation_db_per_100m = 9.8
//! epsilon_r = 1.26
//!
//! [fig2]
//! lengths_m = [50.0, 100.0, 200.0, 300.0, 500.0, 1000.0]
//! pa_counts = [1, 2, 4, 8]
//!
//! [fig3]
//! length_m = 500.0
//! pa_count = 40
//! snr_min_db = 0.0
//! snr_max_db = 25.0
//! snr_step_db = 1.0
//!
//! [ce]
//! length_m = 100.0
//! pa_count = 16
//! speed_kmh = 60.0
//! pilot_interval_s = 0.000625
//! history = 16
//! snr_min_db = 0.0
//! snr_max_db = 20.0
//! ```

use std::fs;
use std::path::Path;

use railwave_core::ce::CeParams;
use railwave_core::corridor::defaults;
use railwave_core::sweep::{ScenarioSpec, POWER_CURVE_LENGTH_M, POWER_CURVE_PA_COUNT};
use railwave_core::{Architecture, CorridorGeometry, LcxParams, PassParams, RadioConfig};
use serde::{Deserialize, Serialize};

use crate::error::{io_at, Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub seed: u64,
    pub radio: RadioSection,
    pub corridor: CorridorSection,
    pub pass: PassSection,
    pub lcx: LcxSection,
    pub fig2: MatrixSection,
    pub fig3: PowerSection,
    pub ce: CeSection,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RadioSection {
    pub carrier_hz: f64,
    pub noise_dbm: f64,
    pub power_dbm: f64,
}

impl Default for RadioSection {
    fn default() -> Self {
        RadioSection {
            carrier_hz: defaults::CARRIER_HZ,
            noise_dbm: defaults::NOISE_DBM,
            power_dbm: defaults::TRANSMIT_DBM,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorridorSection {
    pub length_m: f64,
    pub width_m: f64,
    pub height_m: f64,
    pub samples: usize,
}

impl Default for CorridorSection {
    fn default() -> Self {
        CorridorSection {
            length_m: 100.0,
            width_m: defaults::WIDTH_M,
            height_m: defaults::HEIGHT_M,
            samples: defaults::SAMPLE_COUNT,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PassSection {
    pub eta: f64,
    pub n_eff: f64,
    pub pitch_m: f64,
}

impl Default for PassSection {
    fn default() -> Self {
        PassSection { eta: defaults::PA_ETA, n_eff: defaults::PA_N_EFF, pitch_m: defaults::PA_PITCH_M }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LcxSection {
    pub slot_pitch_m: f64,
    pub attenuation_db_per_100m: f64,
    pub epsilon_r: f64,
}

impl Default for LcxSection {
    fn default() -> Self {
        LcxSection {
            slot_pitch_m: defaults::LCX_SLOT_PITCH_M,
            attenuation_db_per_100m: defaults::LCX_ATTENUATION_DB_PER_100M,
            epsilon_r: defaults::LCX_EPSILON_R,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatrixSection {
    pub lengths_m: Vec<f64>,
    pub pa_counts: Vec<usize>,
}

impl Default for MatrixSection {
    fn default() -> Self {
        MatrixSection { lengths_m: defaults::LENGTHS_M.to_vec(), pa_counts: vec![1, 2, 4, 8] }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PowerSection {
    pub length_m: f64,
    pub pa_count: usize,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
    pub snr_step_db: f64,
}

impl Default for PowerSection {
    fn default() -> Self {
        PowerSection {
            length_m: POWER_CURVE_LENGTH_M,
            pa_count: POWER_CURVE_PA_COUNT,
            snr_min_db: 0.0,
            snr_max_db: 25.0,
            snr_step_db: 1.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CeSection {
    pub length_m: f64,
    pub pa_count: usize,
    pub speed_kmh: f64,
    pub pilot_interval_s: f64,
    pub history: usize,
    pub snr_min_db: f64,
    pub snr_max_db: f64,
}

impl Default for CeSection {
    fn default() -> Self {
        let p = CeParams::default();
        CeSection {
            length_m: p.length,
            pa_count: p.pa_count,
            speed_kmh: p.speed_kmh,
            pilot_interval_s: p.pilot_interval_s,
            history: p.history,
            snr_min_db: p.snr_min_db,
            snr_max_db: p.snr_max_db,
        }
    }
}

impl Settings {
    /// Defaults, overlaid with the TOML file at `path` when given.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(Settings::default()),
            Some(p) => {
                let text = fs::read_to_string(p).map_err(io_at(p))?;
                Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", p.display())))
            }
        }
    }

    pub fn from_toml(text: &str) -> std::result::Result<Self, toml::de::Error> {
        toml::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("settings always serialize")
    }

    pub fn radio(&self) -> Result<RadioConfig> {
        Ok(RadioConfig::from_dbm(self.radio.carrier_hz, self.radio.noise_dbm, self.radio.power_dbm)?)
    }

    pub fn geometry(&self, length: f64) -> Result<CorridorGeometry> {
        Ok(CorridorGeometry::new(length, self.corridor.width_m, self.corridor.height_m)?)
    }

    pub fn pass_params(&self) -> PassParams {
        PassParams { eta: self.pass.eta, n_eff: self.pass.n_eff }
    }

    pub fn lcx_params(&self) -> Result<LcxParams> {
        Ok(LcxParams::new(
            self.lcx.slot_pitch_m,
            self.lcx.attenuation_db_per_100m,
            self.lcx.epsilon_r,
        )?)
    }

    /// Scenario template for the corridor length currently configured.
    pub fn scenario(&self, architecture: Architecture) -> Result<ScenarioSpec> {
        Ok(ScenarioSpec {
            architecture,
            geometry: self.geometry(self.corridor.length_m)?,
            radio: self.radio()?,
            pass: self.pass_params(),
            lcx: self.lcx_params()?,
            sample_count: self.corridor.samples,
        })
    }

    pub fn ce_params(&self) -> CeParams {
        CeParams {
            length: self.ce.length_m,
            pa_count: self.ce.pa_count,
            height: self.corridor.height_m,
            carrier_frequency: self.radio.carrier_hz,
            eta: self.pass.eta,
            n_eff: self.pass.n_eff,
            speed_kmh: self.ce.speed_kmh,
            pilot_interval_s: self.ce.pilot_interval_s,
            history: self.ce.history,
            snr_min_db: self.ce.snr_min_db,
            snr_max_db: self.ce.snr_max_db,
        }
    }
}
