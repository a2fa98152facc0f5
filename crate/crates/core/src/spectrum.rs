//! Spectrum partitioning between the tiers, load-driven borrowing, and femto
//! traffic generation.
//!
//! Bandwidth is booked in whole Hz so every allocation sums to the pool exactly.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::sampling::poisson_inverse_cdf;
use crate::{Error, Result};

/// Admission cap per femto BS.
pub const MAX_FEMTO_USERS: u32 = 20;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpectrumConfig {
    pub total_khz: f64,
    pub macro_share_khz: f64,
    /// Load above which a tier borrows idle spectrum from the other.
    pub hotspot_threshold: f64,
    pub macro_load_mean: f64,
    pub macro_load_std: f64,
}

impl Default for SpectrumConfig {
    fn default() -> Self {
        SpectrumConfig {
            total_khz: 1000.0,
            macro_share_khz: 500.0,
            hotspot_threshold: 0.8,
            macro_load_mean: 0.6,
            macro_load_std: 0.2,
        }
    }
}

impl SpectrumConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.total_khz > 0.0 && self.total_khz.is_finite()) {
            return Err(Error::invalid("total_khz", "must be positive"));
        }
        if !(self.macro_share_khz >= 0.0 && self.macro_share_khz <= self.total_khz) {
            return Err(Error::invalid("macro_share_khz", "must lie in [0, total_khz]"));
        }
        if !(self.hotspot_threshold >= 0.0 && self.hotspot_threshold < 1.0) {
            return Err(Error::invalid("hotspot_threshold", "must lie in [0, 1)"));
        }
        if !(self.macro_load_mean.is_finite() && self.macro_load_std >= 0.0 && self.macro_load_std.is_finite()) {
            return Err(Error::invalid("macro_load_std", "load model must be finite with std >= 0"));
        }
        Ok(())
    }
}

fn khz_to_hz(khz: f64) -> u64 {
    (khz * 1000.0).round() as u64
}

fn hz_to_khz(hz: f64) -> f64 {
    hz / 1000.0
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumPlan {
    pub total_hz: u64,
    pub macro_share_hz: u64,
    pub femto_aggregate_hz: u64,
    /// Baseline split of the femto aggregate (largest remainder first).
    pub femto_base_hz: Vec<u64>,
    /// Net per-BS borrowing; negative means lent to the macro tier.
    pub femto_borrow_hz: Vec<i64>,
    pub hotspot_threshold: f64,
}

impl SpectrumPlan {
    pub fn baseline(config: &SpectrumConfig, n_femto: usize) -> Result<SpectrumPlan> {
        config.validate()?;
        let total_hz = khz_to_hz(config.total_khz);
        let macro_share_hz = khz_to_hz(config.macro_share_khz).min(total_hz);
        let femto_aggregate_hz = total_hz - macro_share_hz;
        let femto_base_hz = if n_femto == 0 {
            Vec::new()
        } else {
            let n = n_femto as u64;
            let (each, rem) = (femto_aggregate_hz / n, femto_aggregate_hz % n);
            (0..n).map(|i| each + u64::from(i < rem)).collect()
        };
        Ok(SpectrumPlan {
            total_hz,
            macro_share_hz,
            femto_aggregate_hz,
            femto_borrow_hz: vec![0; n_femto],
            femto_base_hz,
            hotspot_threshold: config.hotspot_threshold,
        })
    }

    pub fn n_femto(&self) -> usize {
        self.femto_base_hz.len()
    }

    /// Nominal per-femto share `femto_aggregate / n_femto` in kHz.
    pub fn per_femto_khz(&self) -> f64 {
        if self.femto_base_hz.is_empty() {
            return 0.0;
        }
        hz_to_khz(self.femto_aggregate_hz as f64) / self.n_femto() as f64
    }

    pub fn macro_borrow_hz(&self) -> i64 {
        -self.femto_borrow_hz.iter().sum::<i64>()
    }

    pub fn macro_allocated_hz(&self) -> u64 {
        (self.macro_share_hz as i64 + self.macro_borrow_hz()) as u64
    }

    pub fn femto_allocated_hz(&self, bs: usize) -> u64 {
        (self.femto_base_hz[bs] as i64 + self.femto_borrow_hz[bs]) as u64
    }

    pub fn total_allocated_hz(&self) -> u64 {
        self.macro_allocated_hz() + (0..self.n_femto()).map(|i| self.femto_allocated_hz(i)).sum::<u64>()
    }

    pub fn macro_allocated_khz(&self) -> f64 {
        hz_to_khz(self.macro_allocated_hz() as f64)
    }

    pub fn femto_allocated_khz(&self, bs: usize) -> f64 {
        hz_to_khz(self.femto_allocated_hz(bs) as f64)
    }
}

fn unit_clamp(x: f64) -> f64 {
    if x.is_nan() {
        0.0
    } else {
        x.clamp(0.0, 1.0)
    }
}

fn floor_frac(fraction: f64, amount: u64) -> u64 {
    ((fraction * amount as f64).floor() as u64).min(amount)
}

/// Rebalances spectrum from the plan's baseline for the given loads.
///
/// A macro hotspot (`macro_load` above threshold) borrows a fraction
/// `(load − thr)/(1 − thr)` of every femto BS's idle spectrum. A congested
/// femto BS asks for the same fraction of its own baseline, served from the
/// macro tier's idle spectrum and scaled down pro rata when the pool is short.
/// Loads outside `[0, 1]` are clamped.
pub fn allocate_spectrum(macro_load: f64, femto_utilizations: &[f64], plan: &SpectrumPlan) -> Result<SpectrumPlan> {
    let n = plan.n_femto();
    if femto_utilizations.len() != n {
        return Err(Error::LengthMismatch {
            left: femto_utilizations.len(),
            right: n,
        });
    }
    let thr = plan.hotspot_threshold;
    let macro_load = unit_clamp(macro_load);
    let utils: Vec<f64> = femto_utilizations.iter().map(|&u| unit_clamp(u)).collect();
    let mut borrow = vec![0i64; n];

    if macro_load > thr {
        let fraction = (macro_load - thr) / (1.0 - thr);
        for (i, &u) in utils.iter().enumerate() {
            let idle = floor_frac(1.0 - u, plan.femto_base_hz[i]);
            borrow[i] -= floor_frac(fraction, idle) as i64;
        }
    }

    let macro_idle = floor_frac(1.0 - macro_load, plan.macro_share_hz);
    let wants: Vec<u64> = utils
        .iter()
        .zip(&plan.femto_base_hz)
        .map(|(&u, &base)| if u > thr { floor_frac((u - thr) / (1.0 - thr), base) } else { 0 })
        .collect();
    let total_want: u64 = wants.iter().sum();
    if total_want > 0 {
        for (b, &w) in borrow.iter_mut().zip(&wants) {
            let granted = if total_want <= macro_idle {
                w
            } else {
                (w as u128 * macro_idle as u128 / total_want as u128) as u64
            };
            *b += granted as i64;
        }
    }

    Ok(SpectrumPlan {
        femto_borrow_hz: borrow,
        ..plan.clone()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficState {
    /// Active users per femto BS, at most [`MAX_FEMTO_USERS`].
    pub active: Vec<u32>,
    /// Offered macro load in `[0, 1]`.
    pub macro_load: f64,
    pub lambda: f64,
}

/// Per-BS active user counts drawn Poisson(`lambda`) and clipped at the cap.
pub fn generate_femto_traffic<R: Rng + ?Sized>(rng: &mut R, lambda: f64, n_bs: usize) -> Result<TrafficState> {
    if !(lambda >= 0.0 && lambda.is_finite() && lambda <= 500.0) {
        return Err(Error::invalid("lambda", "must lie in [0, 500]"));
    }
    let active = (0..n_bs)
        .map(|_| poisson_inverse_cdf(rng.random::<f64>(), lambda, MAX_FEMTO_USERS))
        .collect();
    Ok(TrafficState {
        active,
        macro_load: 0.0,
        lambda,
    })
}

/// Macro offered load `~ Normal(mean, std)` clipped to `[0, 1]`.
pub fn generate_macro_load<R: Rng + ?Sized>(rng: &mut R, mean: f64, std: f64) -> Result<f64> {
    if !(std >= 0.0) {
        return Err(Error::invalid("macro_load_std", "must be nonnegative"));
    }
    let normal = Normal::new(mean, std).map_err(|e| Error::invalid("macro_load_std", e.to_string()))?;
    Ok(unit_clamp(normal.sample(rng)))
}

pub fn utilization(state: &TrafficState) -> Vec<f64> {
    state
        .active
        .iter()
        .map(|&a| a.min(MAX_FEMTO_USERS) as f64 / MAX_FEMTO_USERS as f64)
        .collect()
}

/// One CSV row of a traffic/spectrum snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectrumRow {
    pub bs_id: String,
    pub active: u32,
    pub utilization: f64,
    pub allocated_khz: f64,
}

/// Rows for every femto BS followed by one `macro` row.
pub fn snapshot_rows(state: &TrafficState, plan: &SpectrumPlan) -> Result<Vec<SpectrumRow>> {
    if state.active.len() != plan.n_femto() {
        return Err(Error::LengthMismatch {
            left: state.active.len(),
            right: plan.n_femto(),
        });
    }
    let util = utilization(state);
    let mut rows: Vec<SpectrumRow> = (0..plan.n_femto())
        .map(|i| SpectrumRow {
            bs_id: i.to_string(),
            active: state.active[i],
            utilization: util[i],
            allocated_khz: plan.femto_allocated_khz(i),
        })
        .collect();
    rows.push(SpectrumRow {
        bs_id: "macro".into(),
        active: 0,
        utilization: state.macro_load,
        allocated_khz: plan.macro_allocated_khz(),
    });
    Ok(rows)
}
