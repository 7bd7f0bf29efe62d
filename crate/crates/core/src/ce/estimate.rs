use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Reported NMSE never drops below this value.
pub const NMSE_FLOOR_DB: f64 = -100.0;

/// Per-PA least-squares estimate from a pilot window.
#[derive(Debug, Clone, PartialEq)]
pub struct LsEstimate {
    pub csi: Vec<Complex64>,
    /// `false` for PAs never sounded inside the window; their entry is zero.
    pub observed: Vec<bool>,
}

impl LsEstimate {
    pub fn unobserved(&self) -> usize {
        self.observed.iter().filter(|o| !**o).count()
    }
}

/// With a unit pilot symbol the LS estimate of the sounded PA is the raw
/// observation. Pilots are taken in time order, so each PA keeps its most
/// recent observation.
pub fn ls_estimate<I>(window: I, pa_count: usize) -> LsEstimate
where
    I: IntoIterator<Item = (usize, Complex64)>,
{
    let mut csi = vec![Complex64::new(0.0, 0.0); pa_count];
    let mut observed = vec![false; pa_count];
    for (pa, obs) in window {
        csi[pa] = obs;
        observed[pa] = true;
    }
    LsEstimate { csi, observed }
}

pub fn ratio_to_db(ratio: f64) -> f64 {
    if ratio > 0.0 {
        f64::max(10.0 * libm::log10(ratio), NMSE_FLOOR_DB)
    } else {
        NMSE_FLOOR_DB
    }
}

/// `‖est − truth‖² / ‖truth‖²` for one sample.
pub fn error_ratio(estimate: &[Complex64], truth: &[Complex64]) -> Result<f64> {
    if estimate.len() != truth.len() {
        return Err(Error::domain(alloc::format!(
            "estimate has {} entries, truth has {}",
            estimate.len(),
            truth.len()
        )));
    }
    let norm: f64 = truth.iter().map(|h| h.norm_sqr()).sum();
    if !(norm > 0.0) {
        return Err(Error::domain("true channel has zero norm"));
    }
    let err: f64 = estimate.iter().zip(truth).map(|(e, h)| (e - h).norm_sqr()).sum();
    Ok(err / norm)
}

/// NMSE of a single estimate in dB.
pub fn nmse(estimate: &[Complex64], truth: &[Complex64]) -> Result<f64> {
    error_ratio(estimate, truth).map(ratio_to_db)
}

/// Running mean of per-sample error ratios.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct NmseAccumulator {
    sum: f64,
    count: usize,
}

impl NmseAccumulator {
    pub fn push(&mut self, estimate: &[Complex64], truth: &[Complex64]) -> Result<()> {
        let r = error_ratio(estimate, truth)?;
        self.sum += r;
        self.count += 1;
        Ok(())
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn mean_ratio(&self) -> Option<f64> {
        (self.count > 0).then(|| self.sum / self.count as f64)
    }

    pub fn db(&self) -> Option<f64> {
        self.mean_ratio().map(ratio_to_db)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn truth() -> Vec<Complex64> {
        vec![Complex64::new(1.0, -0.5), Complex64::new(0.2, 0.3), Complex64::new(-0.7, 0.0)]
    }

    #[test]
    fn nmse_examples() {
        let h = truth();
        assert_eq!(nmse(&h, &h).unwrap(), NMSE_FLOOR_DB);
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        assert!(nmse(&zero, &h).unwrap().abs() < 1e-12);
        let double: Vec<_> = h.iter().map(|x| x * 2.0).collect();
        assert!(nmse(&double, &h).unwrap().abs() < 1e-12);
        assert!(matches!(nmse(&h, &zero), Err(Error::Domain(_))));
        assert!(nmse(&h[..2], &h).is_err());
    }

    #[test]
    fn ls_keeps_latest_observation() {
        let a = Complex64::new(1.0, 0.0);
        let b = Complex64::new(0.0, 1.0);
        let est = ls_estimate([(0, a), (2, a), (0, b)], 4);
        assert_eq!(est.csi[0], b);
        assert_eq!(est.csi[2], a);
        assert_eq!(est.observed, vec![true, false, true, false]);
        assert_eq!(est.unobserved(), 2);
    }

    #[test]
    fn accumulator_averages_ratios() {
        let h = truth();
        let zero = vec![Complex64::new(0.0, 0.0); 3];
        let mut acc = NmseAccumulator::default();
        assert_eq!(acc.db(), None);
        acc.push(&h, &h).unwrap();
        acc.push(&zero, &h).unwrap();
        assert_eq!(acc.count(), 2);
        assert!((acc.mean_ratio().unwrap() - 0.5).abs() < 1e-15);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn scaled_truth_error(c in -5.0f64..5.0, re in proptest::collection::vec(-1.0f64..1.0, 4), im in proptest::collection::vec(-1.0f64..1.0, 4)) {
                prop_assume!((c - 1.0).abs() > 1e-3);
                let h: Vec<Complex64> = re.iter().zip(&im).map(|(a, b)| Complex64::new(*a, *b)).collect();
                prop_assume!(h.iter().map(|x| x.norm_sqr()).sum::<f64>() > 1e-6);
                let est: Vec<Complex64> = h.iter().map(|x| x * c).collect();
                let expect = 20.0 * (c - 1.0).abs().log10();
                prop_assert!((nmse(&est, &h).unwrap() - expect.max(NMSE_FLOOR_DB)).abs() < 1e-9);
            }
        }
    }
}
