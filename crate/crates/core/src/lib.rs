//! Two-tier macro/femto cellular network models.
//!
//! The crate is split by concern:
//!
//! * [`geometry`] lays out the macrocell, femto sites and the first co-channel tier.
//! * [`channel`] holds path loss, shadowing, SIR arithmetic and the Gaussian Q-function.
//! * [`antenna`] models ideal sector antennas and the sector interference divisor.
//! * [`analysis`] evaluates closed-form outage, worst-case S/I and DS-CDMA capacity.
//! * [`power`] computes femto downlink/uplink power and hosts the power-control strategies.
//! * [`spectrum`] generates femto traffic and lends idle spectrum between tiers.
//! * [`engine`] runs seeded Monte Carlo outage estimation, sweeps and trade-off searches.

pub mod analysis;
pub mod antenna;
pub mod channel;
pub mod engine;
mod error;
pub mod geometry;
pub mod power;
pub mod sampling;
pub mod spectrum;
pub mod units;

pub use error::{Error, Result};
