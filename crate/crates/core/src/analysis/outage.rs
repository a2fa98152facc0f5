use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::quadrature::adaptive_simpson;
use crate::channel::q_function;
use crate::{Error, Result};

/// Parameters of the log-normal outage model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalysisParams {
    /// SIR margin `γ_o` in dB.
    pub threshold_sir_db: f64,
    pub pathloss_exponent: f64,
    pub interference_margin_db: f64,
    /// Combined shadowing spread `σ_Tot` in dB.
    pub sigma_total_db: f64,
    pub cell_radius: f64,
    /// Distance `d_o` that normalizes user positions.
    pub reference_distance: f64,
}

impl Default for AnalysisParams {
    fn default() -> Self {
        AnalysisParams {
            threshold_sir_db: 18.0,
            pathloss_exponent: 4.0,
            interference_margin_db: 0.0,
            sigma_total_db: 4.0,
            cell_radius: 500.0,
            reference_distance: 50.0,
        }
    }
}

impl AnalysisParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_total_db > 0.0) || self.sigma_total_db.is_nan() {
            return Err(Error::invalid("sigma_total_db", "must be positive"));
        }
        if !self.threshold_sir_db.is_finite() {
            return Err(Error::invalid("threshold_sir_db", "must be finite"));
        }
        if !self.interference_margin_db.is_finite() {
            return Err(Error::invalid("interference_margin_db", "must be finite"));
        }
        if !(2.0..=6.0).contains(&self.pathloss_exponent) {
            return Err(Error::invalid("pathloss_exponent", "must lie in [2, 6]"));
        }
        if !(self.reference_distance.is_finite() && self.reference_distance > 0.0) {
            return Err(Error::invalid("reference_distance", "must be positive"));
        }
        if !(self.cell_radius.is_finite() && self.cell_radius > self.reference_distance) {
            return Err(Error::invalid(
                "cell_radius",
                "must be finite and larger than reference_distance",
            ));
        }
        Ok(())
    }

    /// `R / d_o`, the distance ratio at the cell boundary.
    pub fn boundary_ratio(&self) -> f64 {
        self.cell_radius / self.reference_distance
    }
}

/// Outage probability at distance ratio `ratio` without the `ratio ≥ 1` guard.
/// `ratio = 0` evaluates to 0.
fn outage_unchecked(ratio: f64, p: &AnalysisParams) -> f64 {
    if ratio <= 0.0 {
        return 0.0;
    }
    let x = (p.threshold_sir_db - 10.0 * p.pathloss_exponent * ratio.log10()
        + p.interference_margin_db)
        / p.sigma_total_db;
    q_function(x)
}

/// Outage probability for a user at distance ratio `∂ = d/d_o ≥ 1`:
/// `Q((γ_o − 10·n·log10(∂) + M_I) / σ_Tot)`.
///
/// The probability grows with `∂` and, for `∂ > 1`, with `n`.
pub fn outage_at(distance_ratio: f64, params: &AnalysisParams) -> Result<f64> {
    params.validate()?;
    if !(distance_ratio >= 1.0) || !distance_ratio.is_finite() {
        return Err(Error::Domain(format!(
            "distance ratio {distance_ratio} must be finite and at least 1"
        )));
    }
    Ok(outage_unchecked(distance_ratio, params))
}

const CELL_AVERAGE_TOL: f64 = 1e-8;
const CELL_AVERAGE_MAX_INTERVALS: usize = 10_000;

/// Outage averaged over users uniform in the cell disc, `p(r) = 2r/R²`.
pub fn cell_averaged_outage(params: &AnalysisParams) -> Result<f64> {
    params.validate()?;
    let boundary = params.boundary_ratio();
    // u = r/R
    let integrand = |u: f64| 2.0 * u * outage_unchecked(u * boundary, params);
    let value = adaptive_simpson(integrand, 0.0, 1.0, CELL_AVERAGE_TOL, CELL_AVERAGE_MAX_INTERVALS)?;
    Ok(value.clamp(0.0, 1.0))
}

/// Which of the two closed-form outage profiles to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProfileForm {
    /// Leading factor `e^{−a²/2} − e^{−1/2}`.
    DistanceOffset,
    /// Leading factor `e^{−π²a²} − π/6`.
    PiScaled,
}

/// How the nested exponential term of the closed-form profile is read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LiteralReading {
    /// `e^{((σ²/2)²)/2}` exactly as typeset. Overflows for σ ≳ 2.6 dB.
    AsPrinted,
    /// Nested term read as the log-normal mean correction `σ²/2`.
    #[default]
    LognormalMean,
}

/// Closed-form outage profile `Pr(a)` with `a = d/d_o`, evaluated term by term.
///
/// Comparison-only: nothing in the simulation path consumes it. Non-finite
/// intermediate values are reported as [`Error::Domain`].
pub fn outage_profile_literal(
    a: f64,
    params: &AnalysisParams,
    form: ProfileForm,
    reading: LiteralReading,
) -> Result<f64> {
    params.validate()?;
    if !(a >= 1.0) || !a.is_finite() {
        return Err(Error::Domain(format!("ratio {a} must be finite and at least 1")));
    }
    let sigma2 = params.sigma_total_db * params.sigma_total_db;
    let nested = match reading {
        LiteralReading::AsPrinted => ((sigma2 / 2.0).powi(2) / 2.0).exp(),
        LiteralReading::LognormalMean => sigma2 / 2.0,
    };
    let exponent =
        (-params.threshold_sir_db - 10.0 * params.pathloss_exponent * a.log10() + nested) / sigma2;
    let bracket = 2.0 * PI * exponent.exp() - (2.0 * PI).sqrt();
    if !bracket.is_finite() {
        return Err(Error::Domain(format!(
            "profile bracket overflows (exponent {exponent:e}) for sigma {} dB",
            params.sigma_total_db
        )));
    }
    let lead = match form {
        ProfileForm::DistanceOffset => (-a * a / 2.0).exp() - (-0.5f64).exp(),
        ProfileForm::PiScaled => (-2.0 * a * a * PI * PI / 2.0).exp() - PI / 6.0,
    };
    let value = lead * bracket;
    if !value.is_finite() {
        return Err(Error::Domain("profile value is not finite".into()));
    }
    Ok(value)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilePoint {
    pub ratio: f64,
    pub literal: f64,
    pub outage: f64,
}

/// Evaluates the closed-form profile and [`outage_at`] on the same grid.
pub fn compare_literal_profile(
    params: &AnalysisParams,
    form: ProfileForm,
    reading: LiteralReading,
    ratios: &[f64],
) -> Result<Vec<ProfilePoint>> {
    ratios
        .iter()
        .map(|&a| {
            Ok(ProfilePoint {
                ratio: a,
                literal: outage_profile_literal(a, params, form, reading)?,
                outage: outage_at(a, params)?,
            })
        })
        .collect()
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman_rank_correlation(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() {
        return Err(Error::LengthMismatch {
            left: xs.len(),
            right: ys.len(),
        });
    }
    if xs.len() < 2 {
        return Err(Error::Domain("need at least two points".into()));
    }
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut out = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0;
            for k in i..=j {
                out[idx[k]] = avg;
            }
            i = j + 1;
        }
        out
    }
    let (rx, ry) = (ranks(xs), ranks(ys));
    let n = xs.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for (a, b) in rx.iter().zip(&ry) {
        cov += (a - mx) * (b - my);
        vx += (a - mx).powi(2);
        vy += (b - my).powi(2);
    }
    if vx == 0.0 || vy == 0.0 {
        return Err(Error::Domain("constant input has no rank correlation".into()));
    }
    Ok(cov / (vx * vy).sqrt())
}
