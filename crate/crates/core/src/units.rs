//! Power-domain conversions. Power dB is always `10 * log10(linear)`.

#[inline]
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

#[inline]
pub fn linear_to_db(linear: f64) -> f64 {
    10.0 * linear.log10()
}

#[inline]
pub fn dbm_to_mw(dbm: f64) -> f64 {
    db_to_linear(dbm)
}

#[inline]
pub fn mw_to_dbm(mw: f64) -> f64 {
    linear_to_db(mw)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn conversions() {
        assert!((db_to_linear(20.0) - 100.0).abs() < 1e-12);
        assert!((linear_to_db(63.1) - 18.0).abs() < 1e-3);
        assert!((mw_to_dbm(125.0) - 20.969).abs() < 1e-3);
        assert_eq!(linear_to_db(0.0), f64::NEG_INFINITY);
    }
}
