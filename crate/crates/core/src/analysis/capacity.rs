use serde::{Deserialize, Serialize};

use crate::units::db_to_linear;
use crate::{Error, Result};

/// DS-CDMA cell capacity inputs. dB fields are converted to linear before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CapacityParams {
    pub sectors_q: f64,
    pub processing_gain: f64,
    /// Frequency reuse efficiency `n_f = 1/K_f`.
    pub reuse_efficiency: f64,
    /// Power-control error `C_d` in dB; enters as the multiplier `10^(−C_d/10)`.
    pub pce_cd_db: f64,
    pub source_activity: f64,
    pub ebio_db: f64,
    /// Signal to background noise `S/P_n` in dB.
    pub snr_db: f64,
}

impl Default for CapacityParams {
    fn default() -> Self {
        CapacityParams {
            sectors_q: 3.0,
            processing_gain: 256.0,
            reuse_efficiency: 0.65,
            pce_cd_db: 1.0,
            source_activity: 0.05,
            ebio_db: 7.0,
            snr_db: 26.0,
        }
    }
}

impl CapacityParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.source_activity > 0.0 && self.source_activity <= 1.0) {
            return Err(Error::invalid("source_activity", "must lie in (0, 1]"));
        }
        if !(self.reuse_efficiency > 0.0 && self.reuse_efficiency <= 1.0) {
            return Err(Error::invalid("reuse_efficiency", "must lie in (0, 1]"));
        }
        if !(self.sectors_q > 0.0 && self.sectors_q.is_finite()) {
            return Err(Error::invalid("sectors_q", "must be positive"));
        }
        if !(self.processing_gain > 0.0 && self.processing_gain.is_finite()) {
            return Err(Error::invalid("processing_gain", "must be positive"));
        }
        if !(self.pce_cd_db >= 0.0 && self.pce_cd_db.is_finite()) {
            return Err(Error::invalid("pce_cd_db", "must be a nonnegative dB value"));
        }
        if !(self.ebio_db.is_finite() && self.snr_db.is_finite()) {
            return Err(Error::invalid("ebio_db", "Eb/Io and S/Pn must be finite"));
        }
        Ok(())
    }

    fn noise_to_signal(&self) -> f64 {
        db_to_linear(-self.snr_db)
    }
}

/// Capacity with imperfect power control:
/// `1 + C_d·n_f·(Q·G_p/(E_b/I_o) − P_n/S) / S_f`, floored at one channel.
pub fn capacity_imperfect(params: &CapacityParams) -> Result<f64> {
    params.validate()?;
    let degradation = db_to_linear(-params.pce_cd_db);
    let interference_limited =
        params.sectors_q * params.processing_gain / db_to_linear(params.ebio_db);
    let channels = 1.0
        + degradation * params.reuse_efficiency * (interference_limited - params.noise_to_signal())
            / params.source_activity;
    Ok(channels.max(1.0))
}

/// Capacity with perfect power control: `1 + n_f·(G_p/(E_b/I_o) − P_n/S)`,
/// floored at one channel.
pub fn capacity_perfect(params: &CapacityParams) -> Result<f64> {
    params.validate()?;
    let channels = 1.0
        + params.reuse_efficiency
            * (params.processing_gain / db_to_linear(params.ebio_db) - params.noise_to_signal());
    Ok(channels.max(1.0))
}
