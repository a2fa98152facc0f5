use crate::{Error, Result};

/// Adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Fails with [`Error::QuadratureDiverged`] rather than truncating when more
/// than `max_intervals` subintervals would be needed.
pub fn adaptive_simpson<F>(f: F, a: f64, b: f64, abs_tol: f64, max_intervals: usize) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    struct Panel {
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
    }

    let simpson = |a: f64, b: f64, fa: f64, fm: f64, fb: f64| (b - a) / 6.0 * (fa + 4.0 * fm + fb);

    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let mut stack = vec![Panel {
        a,
        b,
        fa,
        fm,
        fb,
        whole: simpson(a, b, fa, fm, fb),
        tol: abs_tol,
    }];
    let mut total = 0.0;
    let mut accepted = 0usize;

    while let Some(p) = stack.pop() {
        let m = 0.5 * (p.a + p.b);
        let (lm, rm) = (0.5 * (p.a + m), 0.5 * (m + p.b));
        let (flm, frm) = (f(lm), f(rm));
        let left = simpson(p.a, m, p.fa, flm, p.fm);
        let right = simpson(m, p.b, p.fm, frm, p.fb);
        let delta = left + right - p.whole;
        if delta.abs() <= 15.0 * p.tol || (m - p.a) <= f64::EPSILON * p.a.abs().max(1.0) {
            total += left + right + delta / 15.0;
            accepted += 2;
        } else {
            if accepted + stack.len() + 2 > max_intervals {
                return Err(Error::QuadratureDiverged {
                    tolerance: abs_tol,
                    max_intervals,
                    estimate: total + left + right + stack.iter().map(|s| s.whole).sum::<f64>(),
                });
            }
            stack.push(Panel { a: p.a, b: m, fa: p.fa, fm: flm, fb: p.fm, whole: left, tol: 0.5 * p.tol });
            stack.push(Panel { a: m, b: p.b, fa: p.fm, fm: frm, fb: p.fb, whole: right, tol: 0.5 * p.tol });
        }
        if !total.is_finite() {
            return Err(Error::Domain("integrand is not finite".into()));
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_and_smooth_functions() {
        let v = adaptive_simpson(|x| x * x, 0.0, 3.0, 1e-10, 10_000).unwrap();
        assert!((v - 9.0).abs() < 1e-10);
        let v = adaptive_simpson(f64::sin, 0.0, std::f64::consts::PI, 1e-10, 10_000).unwrap();
        assert!((v - 2.0).abs() < 1e-9);
    }

    #[test]
    fn divergence_is_reported() {
        let err = adaptive_simpson(|x| (1.0 / x).sin() / x, 1e-6, 1.0, 1e-12, 50).unwrap_err();
        assert!(matches!(err, Error::QuadratureDiverged { max_intervals: 50, .. }));
    }
}
