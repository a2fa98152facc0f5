use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// One Bernoulli outage experiment. Implementations must draw everything they
/// need from `rng` and hold no mutable state, so trials can run in any order.
pub trait TrialModel: Send + Sync {
    fn name(&self) -> &str;

    /// `true` when the trial ends in outage.
    fn trial(&self, rng: &mut ChaCha8Rng) -> bool;
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OutageEstimate {
    pub p_hat: f64,
    pub stderr: f64,
    pub trials: u64,
    pub outages: u64,
    pub seed: u64,
    pub fingerprint: String,
}

impl OutageEstimate {
    pub fn from_counts(outages: u64, trials: u64, seed: u64, fingerprint: String) -> Self {
        let p = outages as f64 / trials as f64;
        OutageEstimate {
            p_hat: p,
            stderr: (p * (1.0 - p) / trials as f64).sqrt(),
            trials,
            outages,
            seed,
            fingerprint,
        }
    }

    /// Gap `self − other` in units of the combined standard error.
    pub fn z_above(&self, other: &OutageEstimate) -> f64 {
        let se = (self.stderr.powi(2) + other.stderr.powi(2)).sqrt();
        let gap = self.p_hat - other.p_hat;
        if se == 0.0 {
            if gap > 0.0 {
                f64::INFINITY
            } else if gap < 0.0 {
                f64::NEG_INFINITY
            } else {
                0.0
            }
        } else {
            gap / se
        }
    }
}

/// Stream for trial `index`: ChaCha8 keyed by `seed`, stream id `index`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Counts outages over `trials` independent trials in parallel. The count is
/// independent of scheduling since each trial owns its stream.
pub fn count_outages(model: &dyn TrialModel, trials: u64, seed: u64) -> Result<u64> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    Ok((0..trials)
        .into_par_iter()
        .map(|i| u64::from(model.trial(&mut trial_rng(seed, i))))
        .sum())
}

/// Sequential reference run; same result as [`count_outages`].
pub fn count_outages_serial(model: &dyn TrialModel, trials: u64, seed: u64) -> Result<u64> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    Ok((0..trials)
        .rev()
        .map(|i| u64::from(model.trial(&mut trial_rng(seed, i))))
        .sum())
}

pub fn estimate(model: &dyn TrialModel, trials: u64, seed: u64, fingerprint: String) -> Result<OutageEstimate> {
    let outages = count_outages(model, trials, seed)?;
    Ok(OutageEstimate::from_counts(outages, trials, seed, fingerprint))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    struct Coin(f64);

    impl TrialModel for Coin {
        fn name(&self) -> &str {
            "coin"
        }

        fn trial(&self, rng: &mut ChaCha8Rng) -> bool {
            rng.random::<f64>() < self.0
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let coin = Coin(0.3);
        let par = count_outages(&coin, 50_000, 9).unwrap();
        let ser = count_outages_serial(&coin, 50_000, 9).unwrap();
        assert_eq!(par, ser);
    }

    #[test]
    fn coin_rate_within_three_se() {
        let est = estimate(&Coin(0.3), 100_000, 3, String::new()).unwrap();
        assert!((est.p_hat - 0.3).abs() < 3.0 * est.stderr);
        assert!((est.stderr - (est.p_hat * (1.0 - est.p_hat) / 1e5).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn streams_differ_per_trial() {
        let a: u64 = trial_rng(1, 0).random();
        let b: u64 = trial_rng(1, 1).random();
        let c: u64 = trial_rng(2, 0).random();
        assert_ne!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(count_outages(&Coin(0.5), 0, 1).is_err());
    }

    #[test]
    fn z_score_edges() {
        let zero = OutageEstimate::from_counts(0, 10, 0, String::new());
        let one = OutageEstimate::from_counts(10, 10, 0, String::new());
        assert_eq!(one.z_above(&zero), f64::INFINITY);
        assert_eq!(zero.z_above(&zero), 0.0);
    }
}
