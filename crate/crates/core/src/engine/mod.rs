//! Seeded Monte Carlo outage estimation for both tiers, parameter sweeps,
//! capacity comparison and the macro/femto density trade-off.
//!
//! Trial `i` of a run draws from its own ChaCha8 stream keyed by the tier seed
//! and stream id `i`; outage indicators are summed, so estimates do not depend
//! on thread count or scheduling.

mod experiments;
mod models;
mod montecarlo;
mod scenario;

pub use experiments::{
    apply_axis, capacity_comparison, density_tradeoff, estimate_femto_outage, estimate_macro_outage, estimate_tier,
    sweep, sweep_variants, tier_seed, traffic_snapshots, Bracket, CapacityRow, DensityPoint, SimReport, SweepAxis,
    SweepPoint, TrafficSnapshot, Variant,
};
pub use models::{FemtoUplink, MacroDownlink, ModelRegistry};
pub use montecarlo::{count_outages, count_outages_serial, estimate, trial_rng, OutageEstimate, TrialModel};
pub use scenario::{CapacitySection, Scenario};
