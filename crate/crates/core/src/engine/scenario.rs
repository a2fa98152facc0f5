use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::analysis::{AnalysisParams, CapacityParams};
use crate::antenna::{SectorConfig, SectorMode};
use crate::channel::ChannelParams;
use crate::geometry::LayoutConfig;
use crate::power::{PowerControlRegistry, PowerPolicy};
use crate::spectrum::SpectrumConfig;
use crate::{Error, Result};

/// Capacity-curve inputs for both tiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacitySection {
    pub macro_tier: CapacityParams,
    pub femto_tier: CapacityParams,
    pub ebio_grid_db: Vec<f64>,
}

impl Default for CapacitySection {
    fn default() -> Self {
        CapacitySection {
            macro_tier: CapacityParams::default(),
            femto_tier: CapacityParams {
                source_activity: 0.01,
                ..CapacityParams::default()
            },
            ebio_grid_db: (1..=10).map(f64::from).collect(),
        }
    }
}

/// Complete description of a simulation run. Defaults reproduce the reference
/// simulation table; the interference calibration constants live here too.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub layout: LayoutConfig,
    /// Seed for femto site placement, kept apart from the trial seed.
    pub layout_seed: u64,
    pub channel: ChannelParams,
    pub macro_sectors: SectorConfig,
    pub femto_sectors: SectorConfig,
    pub power: PowerPolicy,
    /// Registered power-control strategy name.
    pub power_control: String,
    pub spectrum: SpectrumConfig,
    pub capacity: CapacitySection,
    /// Closed-form outage curve inputs.
    pub analysis: AnalysisParams,
    pub gamma_macro_db: f64,
    pub gamma_femto_db: f64,
    pub phi_macro: f64,
    pub phi_femto: f64,
    /// Linear spreading factor.
    pub processing_gain: f64,
    /// Macro UEs interfering with the femto uplink.
    pub n_macro_interferers: usize,
    /// Carried as metadata only.
    pub stability_alpha: f64,
    /// Mean number of co-channel in-cell macro users seen by the tagged macro user.
    pub macro_users_mean: f64,
    /// Mean active users per femto BS.
    pub femto_users_mean: f64,
    /// Out-of-cell macro interference, in units of the tagged user's received power.
    pub out_of_cell_mean: f64,
    pub out_of_cell_std: f64,
    pub wall_loss_db: f64,
    pub p_macro_dbm: f64,
    /// Received femto uplink power target.
    pub femto_rx_target_mw: f64,
    /// Received macro uplink power target, same units as the femto target.
    pub macro_ul_rx_target_mw: f64,
    pub trials: u64,
    pub master_seed: u64,
    /// Upper bracket for the admissible macro user search.
    pub density_upper: u32,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            layout: LayoutConfig::default(),
            layout_seed: 1,
            channel: ChannelParams::default(),
            macro_sectors: SectorConfig::new(SectorMode::Omni),
            femto_sectors: SectorConfig::new(SectorMode::Omni),
            power: PowerPolicy::default(),
            power_control: "fixed".into(),
            spectrum: SpectrumConfig::default(),
            capacity: CapacitySection::default(),
            analysis: AnalysisParams::default(),
            gamma_macro_db: 12.0,
            gamma_femto_db: 14.0,
            phi_macro: 0.3,
            phi_femto: 0.3,
            processing_gain: 256.0,
            n_macro_interferers: 25,
            stability_alpha: 0.25,
            macro_users_mean: 8.0,
            femto_users_mean: 2.0,
            out_of_cell_mean: 7.5,
            out_of_cell_std: 2.0,
            wall_loss_db: 0.0,
            p_macro_dbm: 43.0,
            femto_rx_target_mw: 150.0,
            macro_ul_rx_target_mw: 30.0,
            trials: 20_000,
            master_seed: 2024,
            density_upper: 64,
        }
    }
}

fn finite(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be finite"))
    }
}

fn probability(name: &'static str, v: f64) -> Result<()> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(Error::invalid(name, "must lie in [0, 1]"))
    }
}

fn nonnegative(name: &'static str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(name, "must be a nonnegative finite number"))
    }
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.layout.validate()?;
        self.channel.validate()?;
        self.macro_sectors.validate()?;
        self.femto_sectors.validate()?;
        self.power.validate()?;
        self.spectrum.validate()?;
        self.capacity.macro_tier.validate()?;
        self.capacity.femto_tier.validate()?;
        self.analysis.validate()?;
        for &e in &self.capacity.ebio_grid_db {
            finite("ebio_grid_db", e)?;
        }
        PowerControlRegistry::builtin().get(&self.power_control)?;
        finite("gamma_macro_db", self.gamma_macro_db)?;
        finite("gamma_femto_db", self.gamma_femto_db)?;
        probability("phi_macro", self.phi_macro)?;
        probability("phi_femto", self.phi_femto)?;
        if !(self.processing_gain.is_finite() && self.processing_gain > 0.0) {
            return Err(Error::invalid("processing_gain", "must be positive"));
        }
        finite("stability_alpha", self.stability_alpha)?;
        nonnegative("macro_users_mean", self.macro_users_mean)?;
        nonnegative("femto_users_mean", self.femto_users_mean)?;
        finite("out_of_cell_mean", self.out_of_cell_mean)?;
        nonnegative("out_of_cell_std", self.out_of_cell_std)?;
        nonnegative("wall_loss_db", self.wall_loss_db)?;
        finite("p_macro_dbm", self.p_macro_dbm)?;
        if !(self.femto_rx_target_mw.is_finite() && self.femto_rx_target_mw > 0.0) {
            return Err(Error::invalid("femto_rx_target_mw", "must be positive"));
        }
        nonnegative("macro_ul_rx_target_mw", self.macro_ul_rx_target_mw)?;
        if self.trials == 0 {
            return Err(Error::invalid("trials", "must be at least 1"));
        }
        Ok(())
    }

    /// `δ = 2/α`, reported but not used by the estimators.
    pub fn stability_exponent(&self) -> f64 {
        2.0 / self.stability_alpha
    }

    /// SHA-256 of the canonical JSON form; covers every field.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("scenario serializes");
        hex::encode(Sha256::digest(&json))
    }

    /// Both tiers switched to the same sector mode.
    pub fn with_sector_mode(&self, mode: SectorMode) -> Scenario {
        let mut s = self.clone();
        s.macro_sectors.mode = mode;
        s.femto_sectors.mode = mode;
        s
    }

    pub fn with_power_control(&self, name: &str) -> Scenario {
        let mut s = self.clone();
        s.power_control = name.to_string();
        s
    }
}
