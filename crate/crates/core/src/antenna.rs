//! Ideal sector antennas.
//!
//! Sector `k` of a base station covers bearings `[alignment + k·w, alignment + (k+1)·w)`
//! with `w = 2π/n`. Sector 0 is the boresight sector. Out-of-sector signals are
//! rejected completely unless a finite rejection is configured.

use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::geometry::wrap_angle;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SectorMode {
    #[serde(rename = "omni")]
    Omni,
    #[serde(rename = "120")]
    Deg120,
    #[serde(rename = "90")]
    Deg90,
}

impl SectorMode {
    pub const ALL: [SectorMode; 3] = [SectorMode::Omni, SectorMode::Deg120, SectorMode::Deg90];

    pub fn n_sectors(self) -> usize {
        match self {
            SectorMode::Omni => 1,
            SectorMode::Deg120 => 3,
            SectorMode::Deg90 => 4,
        }
    }

    pub fn from_n_sectors(n: usize) -> Result<Self> {
        match n {
            1 => Ok(SectorMode::Omni),
            3 => Ok(SectorMode::Deg120),
            4 => Ok(SectorMode::Deg90),
            _ => Err(Error::invalid("n_sectors", format!("{n} is not one of 1, 3, 4"))),
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            SectorMode::Omni => "omni",
            SectorMode::Deg120 => "120",
            SectorMode::Deg90 => "90",
        }
    }
}

impl fmt::Display for SectorMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SectorMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "omni" | "1" | "360" => Ok(SectorMode::Omni),
            "120" | "3" | "deg120" => Ok(SectorMode::Deg120),
            "90" | "4" | "deg90" => Ok(SectorMode::Deg90),
            other => Err(Error::Unknown {
                kind: "sector mode",
                name: other.to_string(),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SectorConfig {
    pub mode: SectorMode,
    pub alignment_rad: f64,
    pub in_sector_gain_db: f64,
    /// `None` is a brick-wall pattern (out-of-sector gain −∞ dB).
    pub out_of_sector_rejection_db: Option<f64>,
}

impl Default for SectorConfig {
    fn default() -> Self {
        SectorConfig::new(SectorMode::Omni)
    }
}

impl SectorConfig {
    pub fn new(mode: SectorMode) -> Self {
        SectorConfig {
            mode,
            alignment_rad: 0.0,
            in_sector_gain_db: 0.0,
            out_of_sector_rejection_db: None,
        }
    }

    pub fn n_sectors(&self) -> usize {
        self.mode.n_sectors()
    }

    pub fn sector_width(&self) -> f64 {
        TAU / self.n_sectors() as f64
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alignment_rad.is_finite() {
            return Err(Error::invalid("alignment_rad", "must be finite"));
        }
        if !self.in_sector_gain_db.is_finite() {
            return Err(Error::invalid("in_sector_gain_db", "must be finite"));
        }
        if let Some(r) = self.out_of_sector_rejection_db {
            if !(r.is_finite() && r >= 0.0) {
                return Err(Error::invalid(
                    "out_of_sector_rejection_db",
                    "must be a nonnegative finite dB value",
                ));
            }
        }
        Ok(())
    }

    /// Sector containing an absolute bearing. Bearings within 1e-9 of a sector
    /// edge (in units of sector widths) snap to that edge so that the lower edge
    /// stays inclusive despite rounding in `atan2`.
    pub fn sector_of_angle(&self, angle_rad: f64) -> usize {
        let n = self.n_sectors();
        if n == 1 {
            return 0;
        }
        let rel = wrap_angle(angle_rad - self.alignment_rad);
        let t = rel / self.sector_width();
        let nearest = t.round();
        let idx = if (t - nearest).abs() < 1e-9 {
            nearest as usize
        } else {
            t.floor() as usize
        };
        idx % n
    }
}

/// Antenna gain towards `angle_rad`, relative to the pattern alignment.
pub fn gain_db(angle_rad: f64, config: &SectorConfig) -> f64 {
    if config.sector_of_angle(angle_rad) == 0 {
        config.in_sector_gain_db
    } else {
        match config.out_of_sector_rejection_db {
            Some(rejection) => config.in_sector_gain_db - rejection,
            None => f64::NEG_INFINITY,
        }
    }
}

/// Divisor applied to cross-tier interference power: the number of sectors.
pub fn interference_reduction_factor(config: &SectorConfig) -> f64 {
    config.n_sectors() as f64
}

/// Buckets interference samples by the sector their arrival angle falls in.
pub fn partition_interference(
    samples: &[f64],
    angles: &[f64],
    config: &SectorConfig,
) -> Result<Vec<f64>> {
    if samples.len() != angles.len() {
        return Err(Error::LengthMismatch {
            left: samples.len(),
            right: angles.len(),
        });
    }
    let mut buckets = vec![0.0; config.n_sectors()];
    for (&power, &angle) in samples.iter().zip(angles) {
        buckets[config.sector_of_angle(angle)] += power;
    }
    Ok(buckets)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn gain_examples() {
        let omni = SectorConfig::new(SectorMode::Omni);
        for a in [0.0, 1.0, 3.0, -2.0, 9.0] {
            assert_eq!(gain_db(a, &omni), 0.0);
        }
        assert_eq!(gain_db(0.1, &SectorConfig::new(SectorMode::Deg120)), 0.0);
        assert_eq!(gain_db(PI, &SectorConfig::new(SectorMode::Deg90)), f64::NEG_INFINITY);
        let finite = SectorConfig {
            out_of_sector_rejection_db: Some(25.0),
            in_sector_gain_db: 3.0,
            ..SectorConfig::new(SectorMode::Deg90)
        };
        assert_eq!(gain_db(PI, &finite), -22.0);
    }

    #[test]
    fn reduction_factor_examples() {
        assert_eq!(interference_reduction_factor(&SectorConfig::new(SectorMode::Omni)), 1.0);
        assert_eq!(interference_reduction_factor(&SectorConfig::new(SectorMode::Deg120)), 3.0);
        assert_eq!(interference_reduction_factor(&SectorConfig::new(SectorMode::Deg90)), 4.0);
    }

    #[test]
    fn parse_modes() {
        assert_eq!("120".parse::<SectorMode>().unwrap(), SectorMode::Deg120);
        assert_eq!("OMNI".parse::<SectorMode>().unwrap(), SectorMode::Omni);
        assert_eq!(SectorMode::from_n_sectors(4).unwrap(), SectorMode::Deg90);
        assert!("60".parse::<SectorMode>().is_err());
        assert!(SectorMode::from_n_sectors(2).is_err());
    }

    #[test]
    fn partition_examples() {
        let omni = SectorConfig::new(SectorMode::Omni);
        let buckets = partition_interference(&[1.0, 2.0, 3.5], &[0.0, 2.0, 5.0], &omni).unwrap();
        assert_eq!(buckets, vec![6.5]);

        let quad = SectorConfig::new(SectorMode::Deg90);
        let angles = vec![PI + 0.3; 5];
        let buckets = partition_interference(&[1.0; 5], &angles, &quad).unwrap();
        assert_eq!(buckets, vec![0.0, 0.0, 5.0, 0.0]);

        assert!(partition_interference(&[1.0], &[], &quad).is_err());
    }

    #[test]
    fn uniform_angles_split_evenly() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let n = 1_000_000;
        let angles: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * TAU).collect();
        let samples = vec![1.0; n];
        for mode in [SectorMode::Deg120, SectorMode::Deg90] {
            let cfg = SectorConfig::new(mode);
            let buckets = partition_interference(&samples, &angles, &cfg).unwrap();
            let share = n as f64 / cfg.n_sectors() as f64;
            for b in buckets {
                assert!((b - share).abs() / share < 0.01);
            }
        }
    }

    proptest! {
        #[test]
        fn partition_conserves_power(
            samples in proptest::collection::vec(0.0f64..1e3, 0..200),
            seed in any::<u64>(),
            align in -7.0f64..7.0,
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let angles: Vec<f64> = samples.iter().map(|_| rng.random_range(-10.0..10.0)).collect();
            let total: f64 = samples.iter().sum();
            for mode in SectorMode::ALL {
                let cfg = SectorConfig { alignment_rad: align, ..SectorConfig::new(mode) };
                let buckets = partition_interference(&samples, &angles, &cfg).unwrap();
                let sum: f64 = buckets.iter().sum();
                prop_assert!((sum - total).abs() <= 1e-9 * total.max(1e-300));
            }
        }

        #[test]
        fn gain_is_periodic(angle in -20.0f64..20.0, k in -3i32..3) {
            for mode in SectorMode::ALL {
                let cfg = SectorConfig::new(mode);
                let shifted = angle + k as f64 * TAU;
                prop_assert_eq!(cfg.sector_of_angle(angle), cfg.sector_of_angle(shifted));
            }
        }
    }

    #[test]
    fn gain_is_piecewise_constant_per_sector() {
        for mode in SectorMode::ALL {
            let cfg = SectorConfig {
                out_of_sector_rejection_db: Some(20.0),
                ..SectorConfig::new(mode)
            };
            let w = cfg.sector_width();
            for k in 0..cfg.n_sectors() {
                let start = k as f64 * w;
                let reference = gain_db(start, &cfg);
                for j in 1..50 {
                    assert_eq!(gain_db(start + w * j as f64 / 50.0, &cfg), reference);
                }
                assert_eq!(cfg.sector_of_angle(start + 0.5 * w), k);
            }
        }
    }
}
