//! The imaginary error function and Dawson's integral.
//!
//! ```text
//!            2      x                              -x²  x
//! erfi(x) = ---  ∫  exp(t²) dt        daw(x) = e    ∫  exp(t²) dt
//!           √π   0                                   0
//! ```
//!
//! `erfi` grows like exp(x²)/(x√π), so it is computed through the bounded
//! Dawson integral, `erfi(x) = 2 e^{x²} daw(x)/√π`, which keeps every
//! intermediate finite for |x| ≲ 26.6 (the point where e^{x²} itself leaves
//! f64 range). Callers that only need arctan(erfi) or a reciprocal beyond
//! that point should use [`erfi_recip`] or [`ln_erfi`], which never
//! overflow.
//!
//! Dawson's integral uses the sampling-theorem expansion
//!
//! ```text
//! daw(x) ≈ (1/√π) Σ_{n odd} exp(-(x - n h)²) / n
//! ```
//!
//! whose error is O(exp(-(π/2h)²)); h = 0.2 puts that near 1e-27, far below
//! double precision. Small arguments switch to the alternating Maclaurin
//! series to preserve relative accuracy where the sampling form would
//! cancel.

/// √π to full double precision.
pub const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Dawson's integral `daw(x) = e^{-x²} ∫_0^x e^{t²} dt`.
///
/// Odd by construction: the negative axis is evaluated by mirroring, so
/// `daw(-x) == -daw(x)` holds bit-for-bit.
pub fn dawson(x: f64) -> f64 {
    if x < 0.0 {
        return -dawson(-x);
    }
    if x == 0.0 {
        return 0.0;
    }
    if x < 0.5 {
        // Maclaurin series: x - 2x³/3 + 4x⁵/15 - ... (ratio -2x²/(2k+3)).
        let x2 = x * x;
        let mut term = x;
        let mut sum = x;
        let mut k = 0.0;
        loop {
            term *= -2.0 * x2 / (2.0 * k + 3.0);
            let next = sum + term;
            if next == sum {
                return sum;
            }
            sum = next;
            k += 1.0;
        }
    }

    // Sampling-theorem form. Terms fall off as a Gaussian around n ≈ x/h;
    // |x - nh| ≤ 6.8 covers everything above 1e-20 of the peak.
    const H: f64 = 0.2;
    let n0 = {
        let raw = (x / H).round() as i64;
        if raw % 2 == 0 {
            raw + 1
        } else {
            raw
        }
    };
    let span = (6.8 / H) as i64; // = 34
    let mut sum = 0.0;
    let mut n = n0 - span;
    while n <= n0 + span {
        if n != 0 {
            let d = x - n as f64 * H;
            sum += (-d * d).exp() / n as f64;
        }
        n += 2;
    }
    sum / SQRT_PI
}

/// The imaginary error function `erfi(x) = 2/√π ∫_0^x e^{t²} dt`.
///
/// Exactly odd. Overflows to ±∞ only where the value itself exceeds f64
/// range (|x| ≳ 26.6); use [`ln_erfi`] or [`erfi_recip`] past that point.
pub fn erfi(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    2.0 / SQRT_PI * (x * x).exp() * dawson(x)
}

/// `1 / erfi(x)` for x > 0, computed without forming e^{x²}.
///
/// Underflows gracefully to 0 for large x, which is exactly what saturating
/// arctan evaluations need: `atan(erfi(x)) = π/2 - atan(erfi_recip(x))`.
pub fn erfi_recip(x: f64) -> f64 {
    assert!(x > 0.0, "erfi_recip requires x > 0 (got {x})");
    SQRT_PI / 2.0 * (-x * x).exp() / dawson(x)
}

/// `ln(erfi(x))` for x > 0, valid far beyond the overflow point of
/// [`erfi`] itself.
pub fn ln_erfi(x: f64) -> f64 {
    assert!(x > 0.0, "ln_erfi requires x > 0 (got {x})");
    x * x + (2.0 / SQRT_PI * dawson(x)).ln()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    /// Series oracle for erfi: term-by-term Maclaurin sum
    /// erfi(x) = 2/√π Σ x^{2k+1} / (k! (2k+1)).
    /// All terms are positive, so there is no cancellation at any x; the
    /// only cost is term count (~2x² + margin).
    fn erfi_series(x: f64) -> f64 {
        let x2 = x * x;
        let mut power = x; // x^{2k+1} / k!
        let mut sum = x;
        let mut k = 0.0;
        loop {
            k += 1.0;
            power *= x2 / k;
            let next = sum + power / (2.0 * k + 1.0);
            if next == sum {
                return 2.0 / SQRT_PI * sum;
            }
            sum = next;
        }
    }

    #[test]
    fn erfi_matches_series_oracle_on_a_grid() {
        let mut x = 0.05;
        while x <= 6.0 {
            let reference = erfi_series(x);
            assert_relative_eq!(erfi(x), reference, max_relative = 2e-14);
            x += 0.173;
        }
    }

    #[test]
    fn erfi_at_zero_and_one() {
        assert_eq!(erfi(0.0), 0.0);
        // Frozen from the series oracle.
        assert_relative_eq!(erfi(1.0), 1.650_425_758_797_543, max_relative = 1e-13);
    }

    #[test]
    fn erfi_is_odd_to_machine_precision() {
        let mut x = 0.01;
        while x < 6.0 {
            let plus = erfi(x);
            let minus = erfi(-x);
            assert!(
                (plus + minus).abs() <= 1e-14 * plus.abs().max(1.0),
                "odd symmetry violated at {x}: {plus} vs {minus}"
            );
            x += 0.317;
        }
    }

    #[test]
    fn erfi_derivative_identity() {
        // d/dx erfi = 2 e^{x²} / √π; check by central difference at x = 1.
        let h = 1e-5;
        let fd = (erfi(1.0 + h) - erfi(1.0 - h)) / (2.0 * h);
        let exact = 2.0 / SQRT_PI * 1.0_f64.exp();
        assert_relative_eq!(fd, exact, max_relative = 1e-9);
    }

    #[test]
    fn dawson_known_value() {
        // daw(1) frozen from the series oracle: erfi_series(1)·√π/(2e).
        let reference = erfi_series(1.0) * SQRT_PI / (2.0 * 1.0_f64.exp());
        assert_relative_eq!(dawson(1.0), reference, max_relative = 1e-14);
        assert_relative_eq!(dawson(1.0), 0.538_079_506_912_768_4, max_relative = 1e-13);
    }

    #[test]
    fn dawson_large_argument_asymptote() {
        // daw(x) → 1/(2x) + 1/(4x³) + 3/(8x⁵) + 15/(16x⁷) + ...
        let x = 50.0_f64;
        let asym = 0.5 / x + 0.25 / (x * x * x) + 0.375 / x.powi(5) + 0.9375 / x.powi(7);
        assert_relative_eq!(dawson(x), asym, max_relative = 1e-12);
    }

    #[test]
    fn recip_and_log_forms_agree_with_direct_in_overlap() {
        for &x in &[0.7, 1.3, 2.9, 4.4, 6.0, 10.0] {
            assert_relative_eq!(erfi_recip(x), 1.0 / erfi(x), max_relative = 1e-13);
            assert_relative_eq!(ln_erfi(x), erfi(x).ln(), max_relative = 1e-13);
        }
    }

    #[test]
    fn log_form_survives_where_direct_overflows() {
        // e^{x²} overflows past x ≈ 26.6; ln_erfi must stay finite.
        assert!(erfi(40.0).is_infinite());
        let l = ln_erfi(40.0);
        // ln erfi(x) ≈ x² - ln(x√π) for large x.
        let approx_val = 1600.0 - (40.0 * SQRT_PI).ln();
        assert_abs_diff_eq!(l, approx_val, epsilon = 1e-3);
        // And the reciprocal underflows to zero instead of overflowing.
        assert_eq!(erfi_recip(40.0), 0.0);
    }

    #[test]
    fn non_positive_arguments_panic_for_directional_forms() {
        assert!(std::panic::catch_unwind(|| erfi_recip(-1.0)).is_err());
        assert!(std::panic::catch_unwind(|| ln_erfi(0.0)).is_err());
    }
}
