use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::models::ModelRegistry;
use super::montecarlo::{estimate, OutageEstimate};
use super::scenario::Scenario;
use crate::analysis::{capacity_imperfect, capacity_perfect, CapacityParams};
use crate::antenna::SectorMode;
use crate::spectrum::{allocate_spectrum, generate_femto_traffic, generate_macro_load, snapshot_rows, SpectrumPlan, SpectrumRow};
use crate::{Error, Result};

/// Seed offset separating the femto-tier trial streams from the macro tier.
const FEMTO_SEED_OFFSET: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn tier_seed(master_seed: u64, tier: &str) -> u64 {
    match tier {
        "femto" => master_seed.wrapping_add(FEMTO_SEED_OFFSET),
        _ => master_seed,
    }
}

/// Runs the named tier model with the scenario's trial count and seed.
pub fn estimate_tier(scenario: &Scenario, tier: &str) -> Result<OutageEstimate> {
    let model = ModelRegistry::builtin().build(tier, scenario)?;
    estimate(
        model.as_ref(),
        scenario.trials,
        tier_seed(scenario.master_seed, tier),
        scenario.fingerprint(),
    )
}

pub fn estimate_macro_outage(scenario: &Scenario) -> Result<OutageEstimate> {
    estimate_tier(scenario, "macro")
}

/// Femto outage; a scenario without femto BSs has no femto link and reports zero.
pub fn estimate_femto_outage(scenario: &Scenario) -> Result<OutageEstimate> {
    if scenario.layout.n_femto == 0 {
        scenario.validate()?;
        return Ok(OutageEstimate::from_counts(
            0,
            scenario.trials,
            tier_seed(scenario.master_seed, "femto"),
            scenario.fingerprint(),
        ));
    }
    estimate_tier(scenario, "femto")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    FemtoCount,
    MacroInterferers,
    SectorMode,
    CpcOnOff,
}

impl SweepAxis {
    pub fn label(self) -> &'static str {
        match self {
            SweepAxis::FemtoCount => "femto_count",
            SweepAxis::MacroInterferers => "macro_interferers",
            SweepAxis::SectorMode => "sector_mode",
            SweepAxis::CpcOnOff => "cpc_on_off",
        }
    }

    /// Default values for the axis.
    pub fn default_values(self) -> Vec<String> {
        let v: Vec<&str> = match self {
            SweepAxis::FemtoCount => vec!["1", "4", "8", "12", "16", "20", "24"],
            SweepAxis::MacroInterferers => vec!["0", "5", "10", "15", "20", "25", "30", "35", "40", "45", "50"],
            SweepAxis::SectorMode => vec!["omni", "120", "90"],
            SweepAxis::CpcOnOff => vec!["off", "on"],
        };
        v.into_iter().map(String::from).collect()
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "femto_count" => Ok(SweepAxis::FemtoCount),
            "macro_interferers" => Ok(SweepAxis::MacroInterferers),
            "sector_mode" => Ok(SweepAxis::SectorMode),
            "cpc_on_off" => Ok(SweepAxis::CpcOnOff),
            other => Err(Error::Unknown {
                kind: "sweep axis",
                name: other.to_string(),
            }),
        }
    }
}

/// Antenna and power-control combination applied to both tiers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Variant {
    pub sector_mode: SectorMode,
    pub power_control: String,
}

impl Variant {
    pub fn of(scenario: &Scenario) -> Variant {
        Variant {
            sector_mode: scenario.macro_sectors.mode,
            power_control: scenario.power_control.clone(),
        }
    }

    /// Every sector mode with and without cognitive control.
    pub fn all() -> Vec<Variant> {
        SectorMode::ALL
            .iter()
            .flat_map(|&mode| {
                ["fixed", "cpc"].map(|pc| Variant {
                    sector_mode: mode,
                    power_control: pc.to_string(),
                })
            })
            .collect()
    }

    pub fn apply(&self, scenario: &Scenario) -> Scenario {
        scenario.with_sector_mode(self.sector_mode).with_power_control(&self.power_control)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub axis: SweepAxis,
    pub value: String,
    pub sector_mode: SectorMode,
    pub power_control: String,
    pub macro_outage: OutageEstimate,
    pub femto_outage: OutageEstimate,
}

fn parse_count(axis: SweepAxis, value: &str) -> Result<usize> {
    value.trim().parse::<usize>().map_err(|_| Error::InvalidParameter {
        name: "values",
        reason: format!("{axis} value '{value}' is not a nonnegative integer"),
    })
}

fn parse_switch(value: &str) -> Result<&'static str> {
    match value.trim().to_ascii_lowercase().as_str() {
        "on" | "cpc" | "true" | "1" => Ok("cpc"),
        "off" | "fixed" | "false" | "0" => Ok("fixed"),
        other => Err(Error::InvalidParameter {
            name: "values",
            reason: format!("cpc_on_off value '{other}' is not on/off"),
        }),
    }
}

/// Applies one axis value on top of a scenario.
pub fn apply_axis(scenario: &Scenario, axis: SweepAxis, value: &str) -> Result<Scenario> {
    let mut s = scenario.clone();
    match axis {
        SweepAxis::FemtoCount => s.layout.n_femto = parse_count(axis, value)?,
        SweepAxis::MacroInterferers => s.n_macro_interferers = parse_count(axis, value)?,
        SweepAxis::SectorMode => s = s.with_sector_mode(value.parse()?),
        SweepAxis::CpcOnOff => s.power_control = parse_switch(value)?.to_string(),
    }
    Ok(s)
}

/// Sweeps one axis with the scenario's own antenna/power-control setting.
pub fn sweep(scenario: &Scenario, axis: SweepAxis, values: &[String]) -> Result<Vec<SweepPoint>> {
    sweep_variants(scenario, axis, values, &[Variant::of(scenario)])
}

/// Sweeps one axis for each variant. The swept axis overrides the matching
/// part of the variant.
pub fn sweep_variants(
    scenario: &Scenario,
    axis: SweepAxis,
    values: &[String],
    variants: &[Variant],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() {
        return Err(Error::invalid("values", "sweep needs at least one value"));
    }
    if variants.is_empty() {
        return Err(Error::invalid("variants", "sweep needs at least one variant"));
    }
    scenario.validate()?;
    // the axis overrides part of each variant, so variants equal on the rest collapse
    let mut distinct: Vec<&Variant> = Vec::new();
    for v in variants {
        let dup = distinct.iter().any(|d| match axis {
            SweepAxis::SectorMode => d.power_control == v.power_control,
            SweepAxis::CpcOnOff => d.sector_mode == v.sector_mode,
            _ => *d == v,
        });
        if !dup {
            distinct.push(v);
        }
    }
    let mut points = Vec::new();
    for variant in distinct {
        let base = variant.apply(scenario);
        for value in values {
            let point = apply_axis(&base, axis, value)?;
            point.validate()?;
            points.push(SweepPoint {
                axis,
                value: value.clone(),
                sector_mode: point.macro_sectors.mode,
                power_control: point.power_control.clone(),
                macro_outage: estimate_macro_outage(&point)?,
                femto_outage: estimate_femto_outage(&point)?,
            });
        }
    }
    Ok(points)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CapacityRow {
    pub tier: String,
    pub ebio_db: f64,
    pub imperfect: f64,
    /// Imperfect-control expression with the power-control error removed.
    pub perfect_matched: f64,
    /// Perfect-control expression.
    pub perfect: f64,
    /// `perfect_matched / imperfect − 1`.
    pub relative_improvement: f64,
}

fn capacity_rows(tier: &str, params: &CapacityParams, grid: &[f64]) -> Result<Vec<CapacityRow>> {
    grid.iter()
        .map(|&ebio_db| {
            let p = CapacityParams {
                ebio_db,
                ..params.clone()
            };
            let imperfect = capacity_imperfect(&p)?;
            let perfect_matched = capacity_imperfect(&CapacityParams { pce_cd_db: 0.0, ..p.clone() })?;
            Ok(CapacityRow {
                tier: tier.to_string(),
                ebio_db,
                imperfect,
                perfect_matched,
                perfect: capacity_perfect(&p)?,
                relative_improvement: perfect_matched / imperfect - 1.0,
            })
        })
        .collect()
}

/// Perfect versus imperfect power-control capacity over the Eb/Io grid, macro
/// rows first.
pub fn capacity_comparison(scenario: &Scenario) -> Result<Vec<CapacityRow>> {
    let grid = &scenario.capacity.ebio_grid_db;
    if grid.is_empty() {
        return Err(Error::invalid("ebio_grid_db", "must not be empty"));
    }
    let mut rows = capacity_rows("macro", &scenario.capacity.macro_tier, grid)?;
    rows.extend(capacity_rows("femto", &scenario.capacity.femto_tier, grid)?);
    Ok(rows)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bracket {
    /// Feasible at zero, infeasible at the upper bracket.
    Bracketed,
    /// Still feasible at the upper bracket; the result is the bracket itself.
    Saturated,
    /// Targets missed even with no macro users.
    InfeasibleAtZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityPoint {
    pub femto_density: f64,
    pub max_macro_users: Option<u32>,
    pub bracket: Bracket,
    pub macro_outage: Option<OutageEstimate>,
    pub femto_outage: Option<OutageEstimate>,
}

fn with_macro_users(scenario: &Scenario, femto_density: f64, m: u32) -> Scenario {
    let mut s = scenario.clone();
    s.femto_users_mean = femto_density;
    s.macro_users_mean = f64::from(m);
    s.n_macro_interferers = m as usize;
    s
}

fn feasible(scenario: &Scenario) -> Result<(bool, OutageEstimate, OutageEstimate)> {
    let m = estimate_macro_outage(scenario)?;
    let f = estimate_femto_outage(scenario)?;
    let ok = m.p_hat <= scenario.phi_macro && f.p_hat <= scenario.phi_femto;
    Ok((ok, m, f))
}

/// Largest macro user count `m` (both the in-cell mean and the interferer
/// count) keeping both tiers within their outage targets, by integer bisection
/// on `[0, density_upper]`.
pub fn density_tradeoff(scenario: &Scenario, femto_densities: &[f64]) -> Result<Vec<DensityPoint>> {
    if femto_densities.is_empty() {
        return Err(Error::invalid("femto_densities", "must not be empty"));
    }
    scenario.validate()?;
    let upper = scenario.density_upper;
    femto_densities
        .iter()
        .map(|&density| {
            if !(density >= 0.0 && density.is_finite()) {
                return Err(Error::invalid("femto_densities", "must be nonnegative"));
            }
            let (ok0, m0, f0) = feasible(&with_macro_users(scenario, density, 0))?;
            if !ok0 {
                return Ok(DensityPoint {
                    femto_density: density,
                    max_macro_users: None,
                    bracket: Bracket::InfeasibleAtZero,
                    macro_outage: Some(m0),
                    femto_outage: Some(f0),
                });
            }
            let (ok_hi, m_hi, f_hi) = feasible(&with_macro_users(scenario, density, upper))?;
            if ok_hi {
                return Ok(DensityPoint {
                    femto_density: density,
                    max_macro_users: Some(upper),
                    bracket: Bracket::Saturated,
                    macro_outage: Some(m_hi),
                    femto_outage: Some(f_hi),
                });
            }
            let (mut lo, mut hi) = (0u32, upper);
            let (mut best_m, mut best_f) = (m0, f0);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                let (ok, m, f) = feasible(&with_macro_users(scenario, density, mid))?;
                if ok {
                    lo = mid;
                    best_m = m;
                    best_f = f;
                } else {
                    hi = mid;
                }
            }
            Ok(DensityPoint {
                femto_density: density,
                max_macro_users: Some(lo),
                bracket: Bracket::Bracketed,
                macro_outage: Some(best_m),
                femto_outage: Some(best_f),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrafficSnapshot {
    pub round: u32,
    pub rows: Vec<SpectrumRow>,
}

/// Traffic rounds at `lambda` users per femto BS, rebalancing spectrum each
/// round from the baseline plan. Seeded by the scenario's master seed.
pub fn traffic_snapshots(scenario: &Scenario, lambda: f64, rounds: u32) -> Result<Vec<TrafficSnapshot>> {
    scenario.validate()?;
    let n = scenario.layout.n_femto;
    let plan = SpectrumPlan::baseline(&scenario.spectrum, n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(scenario.master_seed);
    (0..rounds)
        .map(|round| {
            let mut state = generate_femto_traffic(&mut rng, lambda, n)?;
            state.macro_load =
                generate_macro_load(&mut rng, scenario.spectrum.macro_load_mean, scenario.spectrum.macro_load_std)?;
            let util = crate::spectrum::utilization(&state);
            let allocated = allocate_spectrum(state.macro_load, &util, &plan)?;
            Ok(TrafficSnapshot {
                round,
                rows: snapshot_rows(&state, &allocated)?,
            })
        })
        .collect()
}

/// Everything a run produced, minus wall-clock time.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SimReport {
    pub version: String,
    pub master_seed: u64,
    pub fingerprint: String,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub estimates: Vec<SweepPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub capacity: Vec<CapacityRow>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub density: Vec<DensityPoint>,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub traffic: Vec<TrafficSnapshot>,
}

impl SimReport {
    pub fn new(scenario: &Scenario) -> SimReport {
        SimReport {
            version: env!("CARGO_PKG_VERSION").to_string(),
            master_seed: scenario.master_seed,
            fingerprint: scenario.fingerprint(),
            ..Default::default()
        }
    }
}
