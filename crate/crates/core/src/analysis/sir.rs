use crate::{Error, Result};

/// Worst-case first-tier S/I for reuse ratio `q` with a mobile at the cell
/// boundary: `1 / (2(Q−1)⁻⁴ + 2(Q+1)⁻⁴ + 2Q⁻⁴)`.
pub fn worst_case_sir_formula(q: f64) -> Result<f64> {
    if !(q > 1.0) {
        return Err(Error::invalid("reuse_ratio", "must exceed 1"));
    }
    if q.is_infinite() {
        return Ok(f64::INFINITY);
    }
    let denom = 2.0 * (q - 1.0).powi(-4) + 2.0 * (q + 1.0).powi(-4) + 2.0 * q.powi(-4);
    Ok(1.0 / denom)
}

/// Interferer distances, in cell radii, seen by a mobile on the boundary of a
/// hexagonal cell: two at `D − R`, then `D − R/2`, `D`, `D + R/2`, `D + R`.
pub fn worst_case_distance_ratios(q: f64) -> [f64; 6] {
    [q - 1.0, q - 1.0, q - 0.5, q, q + 0.5, q + 1.0]
}

/// `S/I = R⁻ⁿ / Σ Dᵢ⁻ⁿ`.
pub fn sir_from_distances(cell_radius: f64, interferer_distances: &[f64], exponent: f64) -> Result<f64> {
    if interferer_distances.is_empty() {
        return Err(Error::invalid("interferer_distances", "must not be empty"));
    }
    if !(cell_radius > 0.0) || interferer_distances.iter().any(|&d| !(d > 0.0)) {
        return Err(Error::invalid("distances", "must all be positive"));
    }
    // normalize by R to keep the powers in range
    let total: f64 = interferer_distances
        .iter()
        .map(|&d| (d / cell_radius).powf(-exponent))
        .sum();
    Ok(1.0 / total)
}
