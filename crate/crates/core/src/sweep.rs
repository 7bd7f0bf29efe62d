//! Corridor sweeps: average spectral efficiency along the track and the
//! minimum transmit power that meets an SNR target at every sampled point.
//!
//! All scenarios are evaluated through their received power per watt of
//! transmit power (`unit gain`), which every architecture is linear in. SNR at
//! power `P` is then `P · G(x) / σ²`, and the minimum power for a target `γ`
//! is exactly `γ σ² / min_x G(x)`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::corridor::{
    db_to_linear, defaults, linear_to_db, spectral_efficiency, watts_to_dbm,
    CorridorGeometry, RadioConfig,
};
use crate::error::{Error, Result};
use crate::lcx::{FeedMode, LcxDeployment, LcxParams};
use crate::pass::{movable_unit_gain, nearest_window, ActivationSet, PassArray, PassParams};

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum Architecture {
    LcxSingle,
    LcxDouble,
    LcxSegmented(usize),
    /// `n` equidistant PAs, all radiating.
    PassFix(usize),
    /// PAs every `pitch` metres, the `n` nearest to the user radiating.
    PassActive { n: usize, pitch: f64 },
    PassMovable,
}

impl Architecture {
    /// Family name without the PA count, as used in the CSV tables.
    pub fn family(&self) -> String {
        match self {
            Architecture::LcxSingle => "lcx-single".into(),
            Architecture::LcxDouble => "lcx-double".into(),
            Architecture::LcxSegmented(s) => alloc::format!("lcx-segmented-{s}"),
            Architecture::PassFix(_) => "pass-fix".into(),
            Architecture::PassActive { .. } => "pass-active".into(),
            Architecture::PassMovable => "pass-movable".into(),
        }
    }

    /// PA count for the PASS families, `None` otherwise.
    pub fn pa_count(&self) -> Option<usize> {
        match self {
            Architecture::PassFix(n) | Architecture::PassActive { n, .. } => Some(*n),
            _ => None,
        }
    }

    pub fn is_lcx(&self) -> bool {
        matches!(
            self,
            Architecture::LcxSingle | Architecture::LcxDouble | Architecture::LcxSegmented(_)
        )
    }

    /// Parses a family name and fills in the count and pitch.
    pub fn from_parts(name: &str, n: usize, pitch: f64) -> Result<Self> {
        let arch = match name {
            "lcx-single" => Architecture::LcxSingle,
            "lcx-double" => Architecture::LcxDouble,
            "pass-fix" => Architecture::PassFix(n),
            "pass-active" => Architecture::PassActive { n, pitch },
            "pass-movable" => Architecture::PassMovable,
            "lcx-segmented" => Architecture::LcxSegmented(4),
            other => match other.strip_prefix("lcx-segmented-").map(str::parse::<usize>) {
                Some(Ok(s)) => Architecture::LcxSegmented(s),
                _ => return Err(Error::config(alloc::format!("unknown architecture `{name}`"))),
            },
        };
        Ok(arch)
    }
}

impl fmt::Display for Architecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Architecture::PassFix(n) => write!(f, "pass-fix({n})"),
            Architecture::PassActive { n, pitch } => write!(f, "pass-active({n}, {pitch} m)"),
            other => f.write_str(&other.family()),
        }
    }
}

impl FromStr for Architecture {
    type Err = Error;

    /// Accepts a family name, optionally followed by `:N`, e.g. `pass-fix:8`.
    fn from_str(s: &str) -> Result<Self> {
        let (name, n) = match s.split_once(':') {
            Some((name, n)) => (
                name,
                n.parse::<usize>()
                    .map_err(|_| Error::config(alloc::format!("bad PA count in `{s}`")))?,
            ),
            None => (s, 1),
        };
        Self::from_parts(name, n, defaults::PA_PITCH_M)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScenarioSpec {
    pub architecture: Architecture,
    pub geometry: CorridorGeometry,
    pub radio: RadioConfig,
    pub pass: PassParams,
    pub lcx: LcxParams,
    pub sample_count: usize,
}

impl ScenarioSpec {
    pub fn new(architecture: Architecture, geometry: CorridorGeometry, radio: RadioConfig) -> Self {
        ScenarioSpec {
            architecture,
            geometry,
            radio,
            pass: PassParams::default(),
            lcx: LcxParams::default(),
            sample_count: defaults::SAMPLE_COUNT,
        }
    }

    pub fn with_architecture(mut self, architecture: Architecture) -> Self {
        self.architecture = architecture;
        self
    }

    pub fn with_samples(mut self, sample_count: usize) -> Self {
        self.sample_count = sample_count;
        self
    }

    /// Midpoint sampling grid `x_k = (k + ½) L / K`.
    pub fn sample_positions(&self) -> Vec<f64> {
        let l = self.geometry.length();
        let k = self.sample_count as f64;
        (0..self.sample_count).map(|i| (i as f64 + 0.5) * l / k).collect()
    }

    pub fn build(&self) -> Result<Scenario> {
        Scenario::build(self)
    }
}

#[derive(Debug, Clone)]
enum Radiator {
    Lcx(LcxDeployment),
    Fixed(PassArray, ActivationSet),
    Active(PassArray, usize),
    Movable(f64),
}

/// A scenario with its radiators laid out, ready for per-point evaluation.
#[derive(Debug, Clone)]
pub struct Scenario {
    spec: ScenarioSpec,
    radiator: Radiator,
    wavelength: f64,
}

impl Scenario {
    pub fn build(spec: &ScenarioSpec) -> Result<Self> {
        if spec.sample_count < 2 {
            return Err(Error::config("a sweep needs at least two sample points"));
        }
        let unit_radio = spec.radio.with_transmit_power(1.0)?;
        let g = spec.geometry;
        let radiator = match spec.architecture {
            Architecture::LcxSingle => {
                Radiator::Lcx(LcxDeployment::build(FeedMode::Single, &g, &unit_radio, &spec.lcx)?)
            }
            Architecture::LcxDouble => {
                Radiator::Lcx(LcxDeployment::build(FeedMode::Double, &g, &unit_radio, &spec.lcx)?)
            }
            Architecture::LcxSegmented(s) => Radiator::Lcx(LcxDeployment::build(
                FeedMode::Segmented(s),
                &g,
                &unit_radio,
                &spec.lcx,
            )?),
            Architecture::PassFix(n) => {
                let array = PassArray::equidistant(n, g, spec.pass)?;
                let all = ActivationSet::all(&array);
                Radiator::Fixed(array, all)
            }
            Architecture::PassActive { n, pitch } => {
                let array = PassArray::pitched(pitch, g, spec.pass)?;
                if n == 0 || n > array.len() {
                    return Err(Error::config(alloc::format!(
                        "cannot activate {n} of {} PAs at {pitch} m pitch over {} m",
                        array.len(),
                        g.length()
                    )));
                }
                Radiator::Active(array, n)
            }
            Architecture::PassMovable => {
                spec.pass.validate()?;
                Radiator::Movable(movable_unit_gain(&unit_radio, &g, spec.pass.eta))
            }
        };
        Ok(Scenario { spec: *spec, radiator, wavelength: spec.radio.wavelength() })
    }

    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    /// Received power per watt of total transmit power at `x_user`.
    pub fn unit_gain(&self, x_user: f64) -> f64 {
        match &self.radiator {
            Radiator::Lcx(d) => d.received_power(x_user, self.wavelength),
            Radiator::Fixed(array, all) => array.unit_gain(all, x_user, self.wavelength),
            Radiator::Active(array, n) => {
                let (lo, hi) = nearest_window(array.positions(), x_user, *n);
                let mut sum = num_complex::Complex64::new(0.0, 0.0);
                for i in lo..hi {
                    sum += array.channel_entry(i, x_user, self.wavelength);
                }
                sum.norm_sqr() / *n as f64
            }
            Radiator::Movable(g) => *g,
        }
    }

    pub fn snr(&self, x_user: f64) -> f64 {
        self.spec.radio.transmit_power() * self.unit_gain(x_user) / self.spec.radio.noise_power()
    }

    pub fn unit_gains(&self) -> Vec<f64> {
        self.spec.sample_positions().into_iter().map(|x| self.unit_gain(x)).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepPoint {
    pub x: f64,
    pub snr_db: f64,
    pub se: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub points: Vec<SweepPoint>,
    pub average_se: f64,
    /// Minimum over the grid of the SNR obtained with 1 W, times `σ²`.
    pub worst_case_unit_gain: f64,
}

impl SweepResult {
    /// Assembles a result from per-point unit gains on the spec's sample grid.
    pub fn from_unit_gains(spec: &ScenarioSpec, gains: &[f64]) -> Result<Self> {
        if gains.len() != spec.sample_count {
            return Err(Error::Integrity(alloc::format!(
                "{} gains for {} sample points",
                gains.len(),
                spec.sample_count
            )));
        }
        let p = spec.radio.transmit_power();
        let noise = spec.radio.noise_power();
        let points: Vec<SweepPoint> = spec
            .sample_positions()
            .into_iter()
            .zip(gains)
            .map(|(x, &g)| {
                let snr = p * g / noise;
                SweepPoint { x, snr_db: linear_to_db(snr), se: spectral_efficiency(snr) }
            })
            .collect();
        let ses: Vec<f64> = points.iter().map(|pt| pt.se).collect();
        let average_se = pairwise_sum(&ses) / ses.len() as f64;
        let worst_case_unit_gain = gains.iter().copied().fold(f64::INFINITY, f64::min);
        Ok(SweepResult { points, average_se, worst_case_unit_gain })
    }
}

/// Deterministic pairwise (tree) summation in index order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 8;
    if values.len() <= LEAF {
        let mut acc = 0.0;
        for v in values {
            acc += v;
        }
        return acc;
    }
    let (left, right) = values.split_at(values.len() / 2);
    pairwise_sum(left) + pairwise_sum(right)
}

pub fn average_se(spec: &ScenarioSpec) -> Result<SweepResult> {
    let scenario = spec.build()?;
    SweepResult::from_unit_gains(spec, &scenario.unit_gains())
}

#[derive(Debug, Clone, PartialEq)]
pub struct MatrixCell {
    pub architecture: Architecture,
    pub length: f64,
    /// The PA-count axis value this cell belongs to.
    pub n: usize,
    pub average_se: f64,
}

/// Architectures compared at one `(L, N)` cell of the spectral-efficiency matrix.
pub fn matrix_architectures(n: usize, pitch: f64) -> [Architecture; 6] {
    [
        Architecture::LcxSingle,
        Architecture::LcxDouble,
        Architecture::LcxSegmented(4),
        Architecture::PassFix(n),
        Architecture::PassActive { n, pitch },
        Architecture::PassMovable,
    ]
}

pub fn compare_matrix(
    lengths: &[f64],
    counts: &[usize],
    template: &ScenarioSpec,
    pitch: f64,
) -> Result<Vec<MatrixCell>> {
    compare_matrix_with(lengths, counts, template, pitch, |s| average_se(s).map(|r| r.average_se))
}

/// Same as [`compare_matrix`] with a caller-supplied evaluator. Scenarios that
/// do not depend on `N` are evaluated once per length.
pub fn compare_matrix_with<F>(
    lengths: &[f64],
    counts: &[usize],
    template: &ScenarioSpec,
    pitch: f64,
    mut evaluate: F,
) -> Result<Vec<MatrixCell>>
where
    F: FnMut(&ScenarioSpec) -> Result<f64>,
{
    if lengths.is_empty() || counts.is_empty() {
        return Err(Error::config("matrix needs at least one length and one PA count"));
    }
    let mut cells = Vec::new();
    for &length in lengths {
        let geometry =
            CorridorGeometry::new(length, template.geometry.width(), template.geometry.height())?;
        let base = ScenarioSpec { geometry, ..*template };
        let mut shared: Vec<(Architecture, f64)> = Vec::new();
        for &n in counts {
            for arch in matrix_architectures(n, pitch) {
                let value = if arch.pa_count().is_none() {
                    match shared.iter().find(|(a, _)| *a == arch) {
                        Some((_, v)) => *v,
                        None => {
                            let v = evaluate(&base.with_architecture(arch))?;
                            shared.push((arch, v));
                            v
                        }
                    }
                } else {
                    evaluate(&base.with_architecture(arch))?
                };
                cells.push(MatrixCell { architecture: arch, length, n, average_se: value });
            }
        }
    }
    Ok(cells)
}

pub fn find_cell<'a>(
    cells: &'a [MatrixCell],
    family: &str,
    length: f64,
    n: usize,
) -> Option<&'a MatrixCell> {
    cells
        .iter()
        .find(|c| c.architecture.family() == family && c.length == length && c.n == n)
}

/// A gap between two architectures reported for the reference setup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportedDelta {
    pub minuend: &'static str,
    pub subtrahend: &'static str,
    pub length: f64,
    pub n: usize,
    pub value: f64,
}

pub const REPORTED_SE_DELTAS: [ReportedDelta; 4] = [
    ReportedDelta { minuend: "pass-active", subtrahend: "lcx-single", length: 50.0, n: 1, value: 2.71 },
    ReportedDelta { minuend: "pass-active", subtrahend: "lcx-single", length: 1000.0, n: 1, value: 13.87 },
    ReportedDelta { minuend: "pass-movable", subtrahend: "lcx-double", length: 1000.0, n: 1, value: 10.79 },
    ReportedDelta { minuend: "pass-movable", subtrahend: "lcx-segmented-4", length: 1000.0, n: 1, value: 7.86 },
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltaCheck {
    pub reported: ReportedDelta,
    pub minuend_se: f64,
    pub subtrahend_se: f64,
    pub delta: f64,
    pub tolerance: f64,
}

impl DeltaCheck {
    pub fn within(&self) -> bool {
        (self.delta - self.reported.value).abs() <= self.tolerance
    }
}

/// Compares matrix cells with the reported gaps at ±20 % or ±0.7 bps/Hz,
/// whichever is larger. Missing cells yield `None`.
pub fn check_reported_deltas(cells: &[MatrixCell]) -> Vec<Option<DeltaCheck>> {
    REPORTED_SE_DELTAS
        .iter()
        .map(|r| {
            let a = find_cell(cells, r.minuend, r.length, r.n)?;
            let b = find_cell(cells, r.subtrahend, r.length, r.n)?;
            Some(DeltaCheck {
                reported: *r,
                minuend_se: a.average_se,
                subtrahend_se: b.average_se,
                delta: a.average_se - b.average_se,
                tolerance: f64::max(0.2 * r.value, 0.7),
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerRequirement {
    pub target_snr_db: f64,
    pub watts: f64,
    pub dbm: f64,
    pub worst_case_unit_gain: f64,
}

/// Minimum power so that `P · G_min / σ² = γ`.
pub fn min_power_for_gain(
    worst_case_unit_gain: f64,
    target_snr_db: f64,
    noise_power: f64,
) -> Result<PowerRequirement> {
    if !target_snr_db.is_finite() {
        return Err(Error::domain("target SNR must be finite"));
    }
    if !(worst_case_unit_gain > 0.0) {
        return Err(Error::Infeasible);
    }
    let watts = db_to_linear(target_snr_db) * noise_power / worst_case_unit_gain;
    Ok(PowerRequirement {
        target_snr_db,
        watts,
        dbm: watts_to_dbm(watts)?,
        worst_case_unit_gain,
    })
}

pub fn min_power(spec: &ScenarioSpec, target_snr_db: f64) -> Result<PowerRequirement> {
    let sweep = average_se(spec)?;
    min_power_for_gain(sweep.worst_case_unit_gain, target_snr_db, spec.radio.noise_power())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCurveRow {
    pub architecture: Architecture,
    pub requirement: PowerRequirement,
}

pub fn power_curve(specs: &[ScenarioSpec], targets_db: &[f64]) -> Result<Vec<PowerCurveRow>> {
    power_curve_with(specs, targets_db, |s| average_se(s).map(|r| r.worst_case_unit_gain))
}

/// Power curve with a caller-supplied worst-case gain evaluator.
pub fn power_curve_with<F>(
    specs: &[ScenarioSpec],
    targets_db: &[f64],
    mut worst_case: F,
) -> Result<Vec<PowerCurveRow>>
where
    F: FnMut(&ScenarioSpec) -> Result<f64>,
{
    if targets_db.is_empty() {
        return Err(Error::config("power curve needs at least one SNR target"));
    }
    let mut rows = Vec::with_capacity(specs.len() * targets_db.len());
    for spec in specs {
        let g = worst_case(spec)?;
        for &t in targets_db {
            rows.push(PowerCurveRow {
                architecture: spec.architecture,
                requirement: min_power_for_gain(g, t, spec.radio.noise_power())?,
            });
        }
    }
    Ok(rows)
}

/// Default corridor length for the power experiment.
pub const POWER_CURVE_LENGTH_M: f64 = 500.0;
pub const POWER_CURVE_PA_COUNT: usize = 40;

/// The five scenarios of the minimum-power comparison.
pub fn power_curve_scenarios(template: &ScenarioSpec, pitch: f64) -> [ScenarioSpec; 5] {
    [
        Architecture::LcxSingle,
        Architecture::LcxDouble,
        Architecture::LcxSegmented(4),
        Architecture::PassFix(POWER_CURVE_PA_COUNT),
        Architecture::PassActive { n: POWER_CURVE_PA_COUNT, pitch },
    ]
    .map(|a| template.with_architecture(a))
}

/// Inclusive SNR target grid from `min` to `max` in `step` increments.
pub fn target_grid(min: f64, max: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(max >= min) || !min.is_finite() || !max.is_finite() {
        return Err(Error::config("SNR grid needs finite bounds and a positive step"));
    }
    let n = libm::floor((max - min) / step + 1e-9) as usize;
    Ok((0..=n).map(|k| min + k as f64 * step).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corridor::dbm_to_watts;

    fn spec(arch: Architecture, l: f64) -> ScenarioSpec {
        ScenarioSpec::new(arch, CorridorGeometry::with_length(l).unwrap(), RadioConfig::default())
    }

    #[test]
    fn midpoint_grid() {
        let s = spec(Architecture::PassMovable, 100.0).with_samples(4);
        assert_eq!(s.sample_positions(), alloc::vec![12.5, 37.5, 62.5, 87.5]);
        assert!(spec(Architecture::PassMovable, 100.0).with_samples(1).build().is_err());
    }

    #[test]
    fn movable_average_is_constant_point() {
        let r = average_se(&spec(Architecture::PassMovable, 100.0).with_samples(100)).unwrap();
        let first = r.points[0].se;
        assert!(r.points.iter().all(|p| p.se == first));
        assert!((r.average_se - first).abs() < 1e-12);
        assert!((first - 18.1).abs() < 0.05);
    }

    #[test]
    fn pairwise_matches_naive_on_exact_values() {
        let v: Vec<f64> = (0..1000).map(|i| i as f64).collect();
        assert_eq!(pairwise_sum(&v), 499_500.0);
        assert_eq!(pairwise_sum(&[]), 0.0);
    }

    #[test]
    fn average_is_mean_of_points() {
        let r = average_se(&spec(Architecture::PassFix(4), 100.0).with_samples(257)).unwrap();
        let naive: f64 = r.points.iter().map(|p| p.se).sum::<f64>() / 257.0;
        assert!((r.average_se - naive).abs() < 1e-12);
        let unit = r.worst_case_unit_gain;
        let min_snr = r.points.iter().map(|p| p.snr_db).fold(f64::INFINITY, f64::min);
        let expect = linear_to_db(dbm_to_watts(10.0) * unit / dbm_to_watts(-120.0));
        assert!((min_snr - expect).abs() < 1e-9);
    }

    #[test]
    fn min_power_movable_hand_value() {
        // γσ² / (η (λ/(4π·5))²) with γ = 20 dB.
        let s = spec(Architecture::PassMovable, 100.0).with_samples(10);
        let p = min_power(&s, 20.0).unwrap();
        assert!((p.dbm + 24.4).abs() < 0.05, "{}", p.dbm);
        let q = min_power(&s, 20.0 + 3.0103).unwrap();
        assert!((q.dbm - p.dbm - 3.0103).abs() < 1e-9);
    }

    #[test]
    fn min_power_rejects_zero_gain() {
        assert_eq!(min_power_for_gain(0.0, 10.0, 1e-15), Err(Error::Infeasible));
        assert!(min_power_for_gain(1e-9, f64::NAN, 1e-15).is_err());
    }

    #[test]
    fn architecture_parsing() {
        assert_eq!("pass-fix:8".parse::<Architecture>().unwrap(), Architecture::PassFix(8));
        assert_eq!(
            "lcx-segmented-4".parse::<Architecture>().unwrap(),
            Architecture::LcxSegmented(4)
        );
        assert_eq!(
            Architecture::from_parts("pass-active", 3, 1.0).unwrap(),
            Architecture::PassActive { n: 3, pitch: 1.0 }
        );
        assert!("pass-fix:x".parse::<Architecture>().is_err());
        assert!("horn".parse::<Architecture>().is_err());
    }

    #[test]
    fn active_count_must_fit() {
        let s = spec(Architecture::PassActive { n: 42, pitch: 1.2195 }, 50.0);
        assert!(s.build().is_err());
    }

    #[test]
    fn matrix_shares_n_independent_cells() {
        let template = spec(Architecture::PassMovable, 50.0).with_samples(50);
        let mut calls = 0;
        let cells = compare_matrix_with(&[50.0], &[1, 2], &template, 1.2195, |s| {
            calls += 1;
            average_se(s).map(|r| r.average_se)
        })
        .unwrap();
        assert_eq!(cells.len(), 12);
        assert_eq!(calls, 4 + 2 * 2);
        assert!(find_cell(&cells, "lcx-double", 50.0, 2).is_some());
    }

    #[test]
    fn target_grid_inclusive() {
        let g = target_grid(0.0, 25.0, 1.0).unwrap();
        assert_eq!(g.len(), 26);
        assert_eq!(*g.last().unwrap(), 25.0);
        assert!(target_grid(0.0, 1.0, 0.0).is_err());
    }
}
