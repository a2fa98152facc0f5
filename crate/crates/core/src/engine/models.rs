//! Per-trial outage models for the two tiers.
//!
//! Each trial consumes a fixed number of draws per source in a fixed order, so
//! a run with fewer femto BSs or macro interferers sees a prefix of the same
//! sources (common random numbers across sweep points).

use std::collections::BTreeMap;
use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::montecarlo::TrialModel;
use super::scenario::Scenario;
use crate::antenna::interference_reduction_factor;
use crate::channel::ChannelParams;
use crate::geometry::{build_layout, sample_in_disc, Disc, Point2D};
use crate::power::{femto_downlink_power, femto_uplink_power, LinkBudgetInputs, PowerControl, PowerControlRegistry, PowerPolicy};
use crate::sampling::poisson_inverse_cdf;
use crate::spectrum::MAX_FEMTO_USERS;
use crate::units::{db_to_linear, dbm_to_mw};
use crate::{Error, Result};

const MACRO_USER_CAP: u32 = 100_000;

fn shadow_factor(rng: &mut ChaCha8Rng, channel: &ChannelParams) -> f64 {
    let z: f64 = rng.sample(StandardNormal);
    db_to_linear(channel.shadow_mean_db + channel.shadow_sigma_db * z)
}

struct FemtoSite {
    disc: Disc,
    /// Nominal transmit power before power control, mW.
    nominal_mw: f64,
}

/// Downlink SIR at a macro user placed uniformly in the cell:
/// `G·P_r / (I_in + I_out + I_f / n_sectors)`.
pub struct MacroDownlink {
    channel: ChannelParams,
    macro_disc: Disc,
    sites: Vec<FemtoSite>,
    strategy: Arc<dyn PowerControl>,
    policy: PowerPolicy,
    p_macro_mw: f64,
    processing_gain: f64,
    threshold: f64,
    sector_factor: f64,
    wall: f64,
    users_mean: f64,
    out_mean: f64,
    out_std: f64,
    /// `P[femto BS has an active user]`.
    femto_active: f64,
}

impl MacroDownlink {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        let layout = build_layout(&scenario.layout, scenario.layout_seed)?;
        let loss_femto_db = scenario.channel.path_loss_db_clamped(layout.femto_radius);
        let sites = (0..layout.femto_sites.len())
            .map(|j| {
                let site = layout.femto_sites[j];
                let inputs = LinkBudgetInputs {
                    p_macro_dbm: scenario.p_macro_dbm,
                    antenna_gain_db: scenario.macro_sectors.in_sector_gain_db,
                    loss_macro_db: scenario.channel.path_loss_db_clamped(site.distance(&layout.macro_center)),
                    loss_femto_db,
                    loss_macro_measured_db: 0.0,
                    n_femto: 1,
                };
                FemtoSite {
                    disc: layout.femto_disc(j),
                    nominal_mw: dbm_to_mw(femto_downlink_power(&inputs, &scenario.power)),
                }
            })
            .collect();
        Ok(MacroDownlink {
            channel: scenario.channel.clone(),
            macro_disc: layout.macro_disc(),
            sites,
            strategy: PowerControlRegistry::builtin().get(&scenario.power_control)?,
            policy: scenario.power.clone(),
            p_macro_mw: dbm_to_mw(scenario.p_macro_dbm),
            processing_gain: scenario.processing_gain,
            threshold: db_to_linear(scenario.gamma_macro_db),
            sector_factor: interference_reduction_factor(&scenario.macro_sectors),
            wall: db_to_linear(-scenario.wall_loss_db),
            users_mean: scenario.macro_users_mean,
            out_mean: scenario.out_of_cell_mean,
            out_std: scenario.out_of_cell_std,
            femto_active: 1.0 - (-scenario.femto_users_mean).exp(),
        })
    }

    /// Nominal femto BS powers in mW, in site order.
    pub fn nominal_powers_mw(&self) -> Vec<f64> {
        self.sites.iter().map(|s| s.nominal_mw).collect()
    }
}

impl TrialModel for MacroDownlink {
    fn name(&self) -> &str {
        "macro"
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> bool {
        let user = sample_in_disc(rng, &self.macro_disc);
        let received = self.p_macro_mw
            * self.channel.path_gain(user.distance(&self.macro_disc.center))
            * shadow_factor(rng, &self.channel);
        let in_cell = poisson_inverse_cdf(rng.random::<f64>(), self.users_mean, MACRO_USER_CAP) as f64;
        let z: f64 = rng.sample(StandardNormal);
        let out_cell = (self.out_mean + self.out_std * z).max(0.0);

        let mut cross = 0.0;
        for site in &self.sites {
            let femto_user = sample_in_disc(rng, &site.disc);
            let active = rng.random::<f64>() < self.femto_active;
            let shadow = shadow_factor(rng, &self.channel);
            if !active {
                continue;
            }
            let tx = self.strategy.adjust(site.nominal_mw, femto_user.distance(&user), &self.policy);
            cross += tx * self.channel.path_gain(site.disc.center.distance(&user)) * self.wall * shadow;
        }

        let denominator = (in_cell + out_cell) * received + cross / self.sector_factor;
        self.processing_gain * received <= self.threshold * denominator
    }
}

/// Uplink SIR at a tagged femto BS:
/// `G·P_r^f / (I_f,in + I_f,out / n_sectors + I_f,f)`.
///
/// Received powers are expressed relative to the power-control targets, so
/// only path-gain ratios enter.
pub struct FemtoUplink {
    channel: ChannelParams,
    macro_center: Point2D,
    macro_disc: Disc,
    sites: Vec<Disc>,
    strategy: Arc<dyn PowerControl>,
    policy: PowerPolicy,
    femto_target: f64,
    macro_target: f64,
    processing_gain: f64,
    threshold: f64,
    sector_factor: f64,
    wall: f64,
    users_mean: f64,
    femto_active: f64,
    n_macro: usize,
    femtos_per_macro_sector: usize,
}

impl FemtoUplink {
    pub fn new(scenario: &Scenario) -> Result<Self> {
        scenario.validate()?;
        if scenario.layout.n_femto == 0 {
            return Err(Error::invalid("n_femto", "femto outage needs at least one femto BS"));
        }
        let layout = build_layout(&scenario.layout, scenario.layout_seed)?;
        let n_sectors = scenario.macro_sectors.n_sectors();
        Ok(FemtoUplink {
            channel: scenario.channel.clone(),
            macro_center: layout.macro_center,
            macro_disc: layout.macro_disc(),
            sites: (0..layout.femto_sites.len()).map(|j| layout.femto_disc(j)).collect(),
            strategy: PowerControlRegistry::builtin().get(&scenario.power_control)?,
            policy: scenario.power.clone(),
            femto_target: scenario.femto_rx_target_mw,
            macro_target: scenario.macro_ul_rx_target_mw,
            processing_gain: scenario.processing_gain,
            threshold: db_to_linear(scenario.gamma_femto_db),
            sector_factor: interference_reduction_factor(&scenario.femto_sectors),
            wall: db_to_linear(-scenario.wall_loss_db),
            users_mean: scenario.femto_users_mean,
            femto_active: 1.0 - (-scenario.femto_users_mean).exp(),
            n_macro: scenario.n_macro_interferers,
            femtos_per_macro_sector: layout.femto_sites.len().div_ceil(n_sectors).max(1),
        })
    }

    fn uplink_nominal_mw(&self, femto_user: &Point2D) -> f64 {
        let inputs = LinkBudgetInputs {
            p_macro_dbm: 0.0,
            antenna_gain_db: 0.0,
            loss_macro_db: 0.0,
            loss_femto_db: 0.0,
            loss_macro_measured_db: self.channel.path_loss_db_clamped(femto_user.distance(&self.macro_center)),
            n_femto: self.femtos_per_macro_sector,
        };
        // n_femto is at least one by construction
        dbm_to_mw(femto_uplink_power(&inputs, &self.policy).unwrap_or(f64::NEG_INFINITY))
    }
}

struct Interferer {
    user: Point2D,
    active: bool,
    shadow: f64,
}

impl TrialModel for FemtoUplink {
    fn name(&self) -> &str {
        "femto"
    }

    fn trial(&self, rng: &mut ChaCha8Rng) -> bool {
        let tagged = rng.random_range(0..self.sites.len());
        let bs = self.sites[tagged].center;
        let in_cell = poisson_inverse_cdf(rng.random::<f64>(), self.users_mean, MAX_FEMTO_USERS - 1) as f64;

        let femtos: Vec<Interferer> = self
            .sites
            .iter()
            .map(|disc| Interferer {
                user: sample_in_disc(rng, disc),
                active: rng.random::<f64>() < self.femto_active,
                shadow: shadow_factor(rng, &self.channel),
            })
            .collect();

        let mut macro_users = Vec::with_capacity(self.n_macro);
        let mut cross = 0.0;
        for _ in 0..self.n_macro {
            let ue = sample_in_disc(rng, &self.macro_disc);
            let shadow = shadow_factor(rng, &self.channel);
            let ratio = self.channel.path_gain(ue.distance(&bs)) / self.channel.path_gain(ue.distance(&self.macro_center));
            cross += self.macro_target * ratio * self.wall * shadow;
            macro_users.push(ue);
        }

        let mut intra = 0.0;
        for (j, f) in femtos.iter().enumerate() {
            if j == tagged || !f.active {
                continue;
            }
            let nominal = self.uplink_nominal_mw(&f.user);
            let victim = macro_users
                .iter()
                .map(|m| m.distance(&f.user))
                .fold(f64::INFINITY, f64::min);
            let scale = if nominal > 0.0 {
                self.strategy.adjust(nominal, victim, &self.policy) / nominal
            } else {
                0.0
            };
            let own = self.sites[j].center;
            let ratio = self.channel.path_gain(f.user.distance(&bs)) / self.channel.path_gain(f.user.distance(&own));
            intra += self.femto_target * scale * ratio * self.wall * self.wall * f.shadow;
        }

        let denominator = in_cell * self.femto_target + cross / self.sector_factor + intra;
        self.processing_gain * self.femto_target <= self.threshold * denominator
    }
}

type ModelBuilder = fn(&Scenario) -> Result<Box<dyn TrialModel>>;

/// Tier models by name.
#[derive(Clone)]
pub struct ModelRegistry {
    builders: BTreeMap<&'static str, ModelBuilder>,
}

impl Default for ModelRegistry {
    fn default() -> Self {
        Self::builtin()
    }
}

impl ModelRegistry {
    pub fn builtin() -> Self {
        let mut builders: BTreeMap<&'static str, ModelBuilder> = BTreeMap::new();
        builders.insert("macro", |s| Ok(Box::new(MacroDownlink::new(s)?)));
        builders.insert("femto", |s| Ok(Box::new(FemtoUplink::new(s)?)));
        ModelRegistry { builders }
    }

    pub fn register(&mut self, name: &'static str, builder: ModelBuilder) {
        self.builders.insert(name, builder);
    }

    pub fn build(&self, name: &str, scenario: &Scenario) -> Result<Box<dyn TrialModel>> {
        let builder = self.builders.get(name).ok_or_else(|| Error::Unknown {
            kind: "tier model",
            name: name.to_string(),
        })?;
        builder(scenario)
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.builders.keys().copied().collect()
    }
}
