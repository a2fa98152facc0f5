//! Propagation and statistics primitives.
//!
//! Log-distance path loss with log-normal shadowing; small-scale fading is not
//! modeled. All dB quantities are power dB.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use statrs::function::erf::erfc;

use crate::units::db_to_linear;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelParams {
    /// Path-loss exponent `n`, in `[2, 6]`.
    pub pathloss_exponent: f64,
    pub shadow_sigma_db: f64,
    /// Mean of the log-normal shadowing term in dB.
    pub shadow_mean_db: f64,
    pub reference_distance: f64,
}

impl Default for ChannelParams {
    fn default() -> Self {
        ChannelParams {
            pathloss_exponent: 4.0,
            shadow_sigma_db: 4.0,
            shadow_mean_db: 0.0,
            reference_distance: 1.0,
        }
    }
}

impl ChannelParams {
    pub fn validate(&self) -> Result<()> {
        if !(2.0..=6.0).contains(&self.pathloss_exponent) {
            return Err(Error::invalid("pathloss_exponent", "must lie in [2, 6]"));
        }
        if !(self.shadow_sigma_db.is_finite() && self.shadow_sigma_db >= 0.0) {
            return Err(Error::invalid("shadow_sigma_db", "must be nonnegative"));
        }
        if !self.shadow_mean_db.is_finite() {
            return Err(Error::invalid("shadow_mean_db", "must be finite"));
        }
        if !(self.reference_distance.is_finite() && self.reference_distance > 0.0) {
            return Err(Error::invalid("reference_distance", "must be positive"));
        }
        Ok(())
    }

    /// Linear path gain with the distance clamped to the reference distance.
    pub fn path_gain(&self, distance: f64) -> f64 {
        let ratio = distance.max(self.reference_distance) / self.reference_distance;
        ratio.powf(-self.pathloss_exponent)
    }

    /// Path loss in dB with the distance clamped to the reference distance.
    pub fn path_loss_db_clamped(&self, distance: f64) -> f64 {
        10.0 * self.pathloss_exponent
            * (distance.max(self.reference_distance) / self.reference_distance).log10()
    }
}

/// Gaussian tail probability `Q(x) = P[Z > x]`, via `Q(x) = erfc(x/√2)/2`.
pub fn q_function(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * erfc(x / std::f64::consts::SQRT_2)
}

/// Log-distance path loss `10·n·log10(d/d_ref)` in dB.
pub fn path_loss_db(distance: f64, params: &ChannelParams) -> Result<f64> {
    if !(distance >= params.reference_distance) {
        return Err(Error::Domain(format!(
            "distance {distance} m is below the reference distance {} m",
            params.reference_distance
        )));
    }
    Ok(10.0 * params.pathloss_exponent * (distance / params.reference_distance).log10())
}

/// Zero-mean normal shadowing offset in dB with standard deviation `sigma_db`.
pub fn shadowing_sample<R: Rng + ?Sized>(rng: &mut R, sigma_db: f64) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    sigma_db * z
}

/// Composite interference `Σ X_k G_k`: sum of linearized gains whose activity
/// indicator is set.
pub fn composite_interference(gains_db: &[f64], activity: &[bool]) -> Result<f64> {
    if gains_db.len() != activity.len() {
        return Err(Error::LengthMismatch {
            left: gains_db.len(),
            right: activity.len(),
        });
    }
    Ok(gains_db
        .iter()
        .zip(activity)
        .filter(|(_, &on)| on)
        .map(|(&g, _)| db_to_linear(g))
        .sum())
}

/// Signal-to-interference ratio in the linear domain.
///
/// Zero total interference returns [`Error::InterferenceFree`] rather than an
/// infinite ratio.
pub fn sir_linear(signal: f64, interferers: &[f64]) -> Result<f64> {
    if !(signal >= 0.0) {
        return Err(Error::invalid("signal", "must be nonnegative"));
    }
    let total: f64 = interferers.iter().sum();
    if total < 0.0 || total.is_nan() {
        return Err(Error::invalid("interferers", "must be nonnegative"));
    }
    if total == 0.0 {
        return Err(Error::InterferenceFree);
    }
    Ok(signal / total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::units::linear_to_db;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn q_function_examples() {
        assert_eq!(q_function(0.0), 0.5);
        assert!((q_function(1.2816) - 0.1).abs() < 1e-4);
        assert!((q_function(6.0) - 9.87e-10).abs() < 1e-11);
    }

    #[test]
    fn q_function_symmetry() {
        let mut worst: f64 = 0.0;
        for i in 0..=1200 {
            let x = -6.0 + i as f64 * 0.01;
            worst = worst.max((q_function(x) + q_function(-x) - 1.0).abs());
        }
        assert!(worst <= 1e-12, "{worst}");
    }

    proptest! {
        #[test]
        fn q_function_is_decreasing(a in -8.0f64..8.0, delta in 1e-3f64..2.0) {
            let (qa, qb) = (q_function(a), q_function(a + delta));
            prop_assert!((0.0..=1.0).contains(&qa));
            prop_assert!(qb < qa);
        }
    }

    #[test]
    fn path_loss_examples() {
        let p4 = ChannelParams::default();
        assert_eq!(path_loss_db(1.0, &p4).unwrap(), 0.0);
        assert!((path_loss_db(10.0, &p4).unwrap() - 40.0).abs() < 1e-12);
        let p5 = ChannelParams {
            pathloss_exponent: 5.0,
            ..Default::default()
        };
        assert!((path_loss_db(100.0, &p5).unwrap() - 100.0).abs() < 1e-12);
        assert!(path_loss_db(0.5, &p4).is_err());
    }

    proptest! {
        #[test]
        fn path_loss_monotone(d in 1.001f64..1e4, k in 1.0001f64..3.0, n in 2.0f64..5.9) {
            let p = ChannelParams { pathloss_exponent: n, ..Default::default() };
            let q = ChannelParams { pathloss_exponent: n + 0.1, ..Default::default() };
            let base = path_loss_db(d, &p).unwrap();
            prop_assert!(path_loss_db(d * k, &p).unwrap() > base);
            prop_assert!(path_loss_db(d, &q).unwrap() > base);
        }
    }

    #[test]
    fn shadowing_zero_sigma() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            assert_eq!(shadowing_sample(&mut rng, 0.0), 0.0);
        }
    }

    #[test]
    fn shadowing_moments() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let n = 1_000_000;
        let (mut s, mut s2) = (0.0, 0.0);
        for _ in 0..n {
            let x = shadowing_sample(&mut rng, 4.0);
            s += x;
            s2 += x * x;
        }
        let mean = s / n as f64;
        let sd = (s2 / n as f64 - mean * mean).sqrt();
        assert!(mean.abs() < 0.02, "mean {mean}");
        assert!((sd - 4.0).abs() / 4.0 < 0.01, "sd {sd}");
    }

    #[test]
    fn composite_interference_examples() {
        assert_eq!(composite_interference(&[3.0, 7.0], &[false, false]).unwrap(), 0.0);
        assert!((composite_interference(&[0.0, 0.0], &[true, true]).unwrap() - 2.0).abs() < 1e-12);
        assert!((composite_interference(&[10.0, 20.0], &[true, true]).unwrap() - 110.0).abs() < 1e-9);
        assert_eq!(
            composite_interference(&[1.0], &[true, false]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        );
    }

    proptest! {
        #[test]
        fn composite_interference_linear(
            gains in proptest::collection::vec(-30.0f64..30.0, 1..12),
            c in -20.0f64..20.0,
            seed in any::<u64>(),
        ) {
            let activity: Vec<bool> = (0..gains.len()).map(|i| (seed >> (i % 64)) & 1 == 1).collect();
            let base = composite_interference(&gains, &activity).unwrap();
            let shifted: Vec<f64> = gains.iter().map(|g| g + c).collect();
            let scaled = composite_interference(&shifted, &activity).unwrap();
            prop_assert!((scaled - base * db_to_linear(c)).abs() <= 1e-9 * scaled.max(1e-300));
        }
    }

    #[test]
    fn sir_examples() {
        assert_eq!(sir_linear(1.0, &[1.0]).unwrap(), 1.0);
        let sir = sir_linear(63.1, &[1.0]).unwrap();
        assert!((linear_to_db(sir) - 18.0).abs() < 1e-3);
        assert_eq!(sir_linear(1.0, &[0.5, 0.5]).unwrap(), 1.0);
        assert_eq!(sir_linear(1.0, &[0.0]), Err(Error::InterferenceFree));
        assert_eq!(sir_linear(1.0, &[]), Err(Error::InterferenceFree));
    }

    #[test]
    fn clamped_gain_matches_path_loss() {
        let p = ChannelParams::default();
        assert_eq!(p.path_gain(0.2), 1.0);
        let d = 321.0;
        let from_db = db_to_linear(-path_loss_db(d, &p).unwrap());
        assert!((p.path_gain(d) - from_db).abs() / from_db < 1e-12);
    }
}
