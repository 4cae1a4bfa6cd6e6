//! Bracketed root refinement.
//!
//! A hybrid of bisection and the secant rule: secant steps are taken while
//! they stay inside the current bracket and shrink it fast enough,
//! otherwise the step falls back to bisection. Convergence is therefore
//! never worse than bisection, and superlinear on smooth sign changes.

use crate::error::{Error, Result};

/// Refines a root of `f` inside the bracket [a, b] until the bracket width
/// drops below `tol` (plus a relative floor near machine precision).
///
/// Errors with [`Error::NoSignChange`] when `f(a)` and `f(b)` have the same
/// sign, and with [`Error::Invalid`] on a degenerate interval or
/// non-positive tolerance.
pub fn find_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<f64> {
    // Negated forms on purpose: NaN inputs must fail validation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(tol > 0.0) {
        return Err(Error::Invalid(format!("root tolerance must be positive (got {tol})")));
    }
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(a < b) {
        return Err(Error::Invalid(format!("root bracket must satisfy a < b (got [{a}, {b}])")));
    }
    let mut lo = a;
    let mut hi = b;
    let mut flo = f(lo);
    let mut fhi = f(hi);
    if !flo.is_finite() || !fhi.is_finite() {
        return Err(Error::Numerical(format!(
            "non-finite endpoint values f({lo}) = {flo}, f({hi}) = {fhi}"
        )));
    }
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoSignChange { a, b });
    }

    // Secant state: the two most recent iterates.
    let (mut x_prev, mut f_prev) = (lo, flo);
    let (mut x_last, mut f_last) = (hi, fhi);

    for _ in 0..200 {
        let width = hi - lo;
        if width <= tol + 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            // Midpoint of the final bracket.
            return Ok(0.5 * (lo + hi));
        }

        // Candidate secant step.
        let mut x_new = if f_last != f_prev {
            x_last - f_last * (x_last - x_prev) / (f_last - f_prev)
        } else {
            f64::NAN
        };
        // Reject secant steps that leave the bracket or fail to shrink it
        // meaningfully; bisect instead.
        let margin = 0.01 * width;
        if !(x_new.is_finite() && x_new > lo + margin && x_new < hi - margin) {
            x_new = 0.5 * (lo + hi);
        }

        let f_new = f(x_new);
        if !f_new.is_finite() {
            return Err(Error::Numerical(format!("non-finite value f({x_new}) = {f_new}")));
        }
        if f_new == 0.0 {
            return Ok(x_new);
        }
        if f_new.signum() == flo.signum() {
            lo = x_new;
            flo = f_new;
        } else {
            hi = x_new;
            fhi = f_new;
        }
        x_prev = x_last;
        f_prev = f_last;
        x_last = x_new;
        f_last = f_new;
    }
    let _ = fhi;
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn linear_root_at_origin() {
        let r = find_root(|x| x, -1.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, 0.0, epsilon = 1e-13);
    }

    #[test]
    fn hermite_2_positive_root() {
        // H_2(x) = 4x² - 2 has its positive root at 1/√2.
        let r = find_root(|x| 4.0 * x * x - 2.0, 0.0, 2.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, std::f64::consts::FRAC_1_SQRT_2, epsilon = 1e-13);
    }

    #[test]
    fn hermite_4_smallest_positive_root_vs_closed_form() {
        // H_4(x) = 16x⁴ - 48x² + 12; roots satisfy x² = (48 ± √1536)/32.
        // The smallest positive root uses the minus branch.
        let oracle = ((48.0 - 1536.0_f64.sqrt()) / 32.0).sqrt();
        let f = |x: f64| 16.0 * x.powi(4) - 48.0 * x * x + 12.0;
        let r = find_root(f, 0.1, 1.0, 1e-14).unwrap();
        assert_abs_diff_eq!(r, oracle, epsilon = 1e-12);
    }

    #[test]
    fn same_sign_bracket_is_rejected() {
        let err = find_root(|x| x * x + 1.0, -1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::NoSignChange { .. }));
    }

    #[test]
    fn degenerate_interval_is_rejected() {
        let err = find_root(|x| x, 1.0, 1.0, 1e-12).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn steep_transcendental_root() {
        // tan(x) - x = 0 near 4.493: a classic stiff bracket.
        let f = |x: f64| x.tan() - x;
        let r = find_root(f, 4.3, 4.6, 1e-13).unwrap();
        assert_abs_diff_eq!(r, 4.493_409_457_909_064, epsilon = 1e-11);
    }
}
