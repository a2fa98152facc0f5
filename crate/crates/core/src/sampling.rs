//! Inverse-transform samplers. Driving them with one uniform per draw couples
//! draws across parameter values: the count is nondecreasing in `lambda` for a
//! fixed uniform.

/// Poisson(`lambda`) quantile at `u`, clipped at `cap`.
pub fn poisson_inverse_cdf(u: f64, lambda: f64, cap: u32) -> u32 {
    if !(lambda > 0.0) {
        return 0;
    }
    let mut k = 0u32;
    let mut pmf = (-lambda).exp();
    let mut cdf = pmf;
    while u > cdf && k < cap {
        k += 1;
        pmf *= lambda / k as f64;
        cdf += pmf;
        if pmf == 0.0 && cdf < u {
            // remaining mass below f64 resolution
            return cap;
        }
    }
    k
}

/// Mean of `min(X, cap)` for `X ~ Poisson(lambda)`, by direct summation.
pub fn clipped_poisson_mean(lambda: f64, cap: u32) -> f64 {
    if !(lambda > 0.0) {
        return 0.0;
    }
    let mut pmf = (-lambda).exp();
    let mut below = 0.0;
    let mut mass = 0.0;
    for k in 0..cap {
        if k > 0 {
            pmf *= lambda / k as f64;
        }
        below += k as f64 * pmf;
        mass += pmf;
    }
    below + cap as f64 * (1.0 - mass).max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quantiles() {
        assert_eq!(poisson_inverse_cdf(0.5, 0.0, 20), 0);
        assert_eq!(poisson_inverse_cdf(0.0, 3.0, 20), 0);
        assert_eq!(poisson_inverse_cdf(1.0, 3.0, 20), 20);
        // P(X=0) = e^{-1} = 0.3679
        assert_eq!(poisson_inverse_cdf(0.36, 1.0, 20), 0);
        assert_eq!(poisson_inverse_cdf(0.37, 1.0, 20), 1);
    }

    #[test]
    fn coupled_in_lambda() {
        for i in 1..200 {
            let u = i as f64 / 200.0;
            let mut prev = 0;
            for l in 0..40 {
                let k = poisson_inverse_cdf(u, l as f64 * 0.5, 20);
                assert!(k >= prev);
                prev = k;
            }
        }
    }

    #[test]
    fn clipped_mean_limits() {
        assert!((clipped_poisson_mean(5.0, 1000) - 5.0).abs() < 1e-9);
        assert!(clipped_poisson_mean(50.0, 20) > 19.99);
    }
}
