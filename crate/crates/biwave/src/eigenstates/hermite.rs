//! Physicists' Hermite polynomials H_n and their roots.
//!
//! Everything analytic about the harmonic oscillator reduces to H_n:
//! wavefunction values and derivatives through the recurrence, node
//! positions through the roots. Values use the three-term recurrence
//! H_{n+1} = 2x·H_n − 2n·H_{n−1}, which is forward-stable for the moderate
//! orders (n ≲ 50) this crate needs; derivatives come from the ladder
//! identity H_n' = 2n·H_{n−1} applied repeatedly.

use crate::error::{Error, Result};
use crate::numerics::find_root;

/// Highest order for which root isolation is supported. The recurrence
/// stays accurate well beyond this; the cap just keeps the interlacing
/// search honest about what has been validated.
pub const MAX_ORDER: usize = 60;

/// H_n(x) by the three-term recurrence.
pub fn hermite(n: usize, x: f64) -> f64 {
    let mut prev = 1.0; // H_0
    if n == 0 {
        return prev;
    }
    let mut curr = 2.0 * x; // H_1
    for k in 1..n {
        let next = 2.0 * x * curr - 2.0 * k as f64 * prev;
        prev = curr;
        curr = next;
    }
    curr
}

/// H_n and its first three derivatives at x, in one recurrence sweep.
///
/// Uses H_n' = 2n·H_{n−1}, so the k-th derivative is a scaled lower-order
/// polynomial: H_n'' = 4n(n−1)·H_{n−2}, H_n''' = 8n(n−1)(n−2)·H_{n−3}.
pub fn hermite_with_derivatives(n: usize, x: f64) -> [f64; 4] {
    let nf = n as f64;
    let h = hermite(n, x);
    let d1 = if n >= 1 {
        2.0 * nf * hermite(n - 1, x)
    } else {
        0.0
    };
    let d2 = if n >= 2 {
        4.0 * nf * (nf - 1.0) * hermite(n - 2, x)
    } else {
        0.0
    };
    let d3 = if n >= 3 {
        8.0 * nf * (nf - 1.0) * (nf - 2.0) * hermite(n - 3, x)
    } else {
        0.0
    };
    [h, d1, d2, d3]
}

/// All n real roots of H_n, ascending.
///
/// Built inductively: the roots of H_{k−1} interlace those of H_k, so
/// together with ±(√(2k+1)+1) — beyond the largest root by the classical
/// bound — they bracket every root of H_k exactly once. Each bracket is
/// closed by bisection/secant and polished with one Newton step.
pub fn hermite_roots(n: usize) -> Result<Vec<f64>> {
    if n > MAX_ORDER {
        return Err(Error::Invalid(format!(
            "Hermite root isolation supports order <= {MAX_ORDER}, got {n}"
        )));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut roots = vec![0.0];
    for k in 2..=n {
        let bound = (2.0 * k as f64 + 1.0).sqrt() + 1.0;
        let mut brackets = Vec::with_capacity(k + 1);
        brackets.push(-bound);
        brackets.extend_from_slice(&roots);
        brackets.push(bound);
        let mut next = Vec::with_capacity(k);
        for w in brackets.windows(2) {
            let mut r = find_root(|x| hermite(k, x), w[0], w[1], 1e-14)?;
            // One Newton polish via H_k' = 2k·H_{k−1}.
            let d = 2.0 * k as f64 * hermite(k - 1, r);
            if d != 0.0 {
                r -= hermite(k, r) / d;
            }
            next.push(r);
        }
        roots = next;
    }
    // Enforce exact odd symmetry: average mirrored pairs and zero the
    // middle root of odd orders, so callers see ±pairs bit-for-bit.
    let m = roots.len();
    for i in 0..m / 2 {
        let sym = 0.5 * (roots[i] - roots[m - 1 - i]);
        roots[i] = sym;
        roots[m - 1 - i] = -sym;
    }
    if m % 2 == 1 {
        roots[m / 2] = 0.0;
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{integrate_adaptive, QuadratureSpec};
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn low_order_values() {
        // H_0..H_4 against their explicit coefficients.
        for &x in &[-1.7, -0.3, 0.0, 0.9, 2.4] {
            assert_eq!(hermite(0, x), 1.0);
            assert_eq!(hermite(1, x), 2.0 * x);
            assert_relative_eq!(hermite(2, x), 4.0 * x * x - 2.0, max_relative = 1e-14);
            assert_relative_eq!(
                hermite(3, x),
                8.0 * x * x * x - 12.0 * x,
                max_relative = 1e-13
            );
            assert_relative_eq!(
                hermite(4, x),
                16.0 * x.powi(4) - 48.0 * x * x + 12.0,
                max_relative = 1e-13
            );
        }
    }

    #[test]
    fn central_values_follow_double_factorial() {
        // H_{2m}(0) = (−1)^m (2m)!/m!; in particular H_10(0) = −30240.
        assert_eq!(hermite(10, 0.0), -30240.0);
        assert_eq!(hermite(2, 0.0), -2.0);
        assert_eq!(hermite(4, 0.0), 12.0);
        assert_eq!(hermite(6, 0.0), -120.0);
        assert_eq!(hermite(5, 0.0), 0.0);
    }

    #[test]
    fn derivative_ladder_matches_finite_differences() {
        let h = 1e-5;
        for n in [1_usize, 3, 6, 10] {
            for &x in &[-2.1, 0.4, 1.9] {
                let d = hermite_with_derivatives(n, x);
                let fd1 = (hermite(n, x + h) - hermite(n, x - h)) / (2.0 * h);
                let fd2 = (hermite(n, x + h) - 2.0 * hermite(n, x) + hermite(n, x - h)) / (h * h);
                assert_relative_eq!(d[1], fd1, max_relative = 1e-8);
                let scale = d[2].abs().max(hermite(n, x).abs()).max(1.0);
                assert_abs_diff_eq!(d[2], fd2, epsilon = 1e-4 * scale);
            }
        }
    }

    #[test]
    fn third_derivative_is_scaled_lower_order() {
        let d = hermite_with_derivatives(5, 0.7);
        assert_relative_eq!(d[3], 8.0 * 5.0 * 4.0 * 3.0 * hermite(2, 0.7));
    }

    #[test]
    fn orthogonality_under_gaussian_weight() {
        // ∫ H_m H_n e^{−x²} dx = δ_mn 2^n n! √π; the tails die fast enough
        // that [−10, 10] is exact to machine precision.
        let spec = QuadratureSpec::default();
        let overlap = |m: usize, n: usize| {
            integrate_adaptive(
                |x: f64| hermite(m, x) * hermite(n, x) * (-x * x).exp(),
                -10.0,
                10.0,
                spec,
            )
            .unwrap()
            .value
        };
        assert_abs_diff_eq!(overlap(3, 5), 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(overlap(2, 6), 0.0, epsilon = 1e-9);
        let sqrt_pi = std::f64::consts::PI.sqrt();
        assert_relative_eq!(overlap(4, 4), 384.0 * sqrt_pi, max_relative = 1e-12);
        assert_relative_eq!(overlap(0, 0), sqrt_pi, max_relative = 1e-12);
    }

    #[test]
    fn quartic_roots_in_closed_form() {
        // H_4 = 16x⁴ − 48x² + 12 has roots x² = (3 ± √6)/2.
        let roots = hermite_roots(4).unwrap();
        let inner = ((3.0 - 6.0_f64.sqrt()) / 2.0).sqrt();
        let outer = ((3.0 + 6.0_f64.sqrt()) / 2.0).sqrt();
        assert_eq!(roots.len(), 4);
        assert_relative_eq!(roots[0], -outer, max_relative = 1e-13);
        assert_relative_eq!(roots[1], -inner, max_relative = 1e-13);
        assert_relative_eq!(roots[2], inner, max_relative = 1e-13);
        assert_relative_eq!(roots[3], outer, max_relative = 1e-13);
    }

    #[test]
    fn tenth_order_roots_match_reference() {
        // Positive roots of H_10, frozen from the closed quadrature
        // literature (Gauss–Hermite abscissae), digits kept verbatim.
        #[allow(clippy::excessive_precision)]
        let reference = [
            0.342_901_327_223_705,
            1.036_610_829_789_514,
            1.756_683_649_299_882,
            2.532_731_674_232_790,
            3.436_159_118_837_738,
        ];
        let roots = hermite_roots(10).unwrap();
        assert_eq!(roots.len(), 10);
        for (i, &r) in reference.iter().enumerate() {
            assert_relative_eq!(roots[5 + i], r, max_relative = 1e-12);
            assert_relative_eq!(roots[4 - i], -r, max_relative = 1e-12);
        }
    }

    #[test]
    fn roots_are_symmetric_and_sorted() {
        for n in [1_usize, 2, 7, 13, 20] {
            let roots = hermite_roots(n).unwrap();
            assert_eq!(roots.len(), n);
            assert!(roots.windows(2).all(|w| w[0] < w[1]));
            for i in 0..n / 2 {
                assert_eq!(roots[i], -roots[n - 1 - i], "mirror pair {i} of H_{n}");
            }
            if n % 2 == 1 {
                assert_eq!(roots[n / 2], 0.0);
            }
            // Each claimed root really is one.
            for &r in &roots {
                let d = hermite_with_derivatives(n, r);
                assert!(d[0].abs() <= 1e-10 * d[1].abs().max(1.0));
            }
        }
    }

    #[test]
    fn excessive_order_is_rejected() {
        assert!(hermite_roots(MAX_ORDER + 1).is_err());
    }
}
