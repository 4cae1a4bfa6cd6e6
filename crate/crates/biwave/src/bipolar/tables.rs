//! Closed-form bipolar phase for harmonic-oscillator eigenstates.
//!
//! In natural oscillator units (m = ω = ħ = 1), with the traveling-wave
//! flux fixed at F = 1/(2π) — so κ = 4mF/ħ = 2/π — the phase s(x) of the
//! two-wave decomposition of the n-th stationary state has an elementary
//! closed form. Writing the branch-free combination
//!
//! ```text
//! T_n(x) = e^{x²} f_n(x) / (√π g_n(x)) + erfi(x),
//! ```
//!
//! the phase obeys tan s = T_n for even n and −cot s = T_n for odd n, with
//! the anchor s(0) = 0. Here g_n is the Hermite polynomial H_n rescaled by
//! (−1)^{⌈n/2⌉}/2^{⌈n/2⌉}, so its zeros are exactly the nodes of ψ_n, and
//! f_n is the unique polynomial of degree n − 1 that makes the combination
//! satisfy the defining phase equation dT_n/dx = κ/ψ_n². That requirement
//! is equivalent to the polynomial identity
//!
//! ```text
//! (2x·f_n + f_n′)·g_n − f_n·g_n′ + 2g_n² = c_n,   c_n = 2^{n+1} n! / 4^{⌈n/2⌉},
//! ```
//!
//! which the unit tests verify for every tabulated order. Because c_n ≠ 0,
//! f_n and g_n share no zeros, and at every node f_n·g_n′ = −c_n < 0: the
//! tangent always runs off to −∞ just right of a node and returns from +∞
//! just left of it, which is what makes the unwrapped phase monotonic.
//!
//! # Evaluation
//!
//! Two regimes keep every digit honest:
//!
//! * **Inside and just beyond the node span** the formula is evaluated
//!   directly. f_n and g_n use compensated Horner summation, and erfi is
//!   recombined through the Dawson function D (erfi = 2e^{x²}D/√π) so both
//!   terms share a single explicit exponential: T = e^{x²}(f/g + 2D)/√π.
//! * **Beyond the outermost node** the bracket f/g + 2D cancels ever more
//!   deeply — it decays like e^{−x²} times the slowly growing tangent —
//!   and no fixed-precision evaluation of the two pieces survives. There
//!   the tangent is instead continued with its own differential equation,
//!   T′ = c_n·e^{x²}/(√π·g_n²), whose right side is strictly positive and
//!   node-free past the last zero of g_n: adaptive quadrature from a
//!   handoff point just past that zero (where the direct value is still
//!   good to ~1e−12) carries T outward without any cancellation.
//!
//! Past |x| = 8 the phase is within 3e−13 of its limit ±(n+1)π/2 for every
//! tabulated order, and the limit is returned directly. Overall absolute
//! accuracy of [`ho_action_analytic`] is a few parts in 1e12.

use std::f64::consts::{FRAC_PI_2, PI};
use std::sync::OnceLock;

use crate::eigenstates::hermite::hermite_roots;
use crate::error::{Error, Result};
use crate::numerics::{dawson, integrate_adaptive, QuadratureSpec, SQRT_PI};

/// Largest quantum number with tabulated closed-form polynomials.
pub const MAX_ANALYTIC_N: usize = 10;

/// Start of the quadrature-continued regime, measured from the outermost
/// node. Close enough that the direct formula has lost at most ~4 digits
/// to bracket cancellation, far enough that g_n is already off its zero.
const HANDOFF_MARGIN: f64 = 0.15;

/// Beyond this |x| the phase is returned as its asymptote ±(n+1)π/2. The
/// slowest approach among the tabulated orders is n = 10, which is within
/// 2.9e−13 of the limit at |x| = 8.
const ASYMPTOTE_CUT: f64 = 8.0;

/// Numerator polynomials f_n, ascending powers (index j holds the x^j
/// coefficient). f_0 ≡ 0: the ground-state combination is erfi alone.
/// Each row is pinned down by the Wronskian identity in the module docs.
const F_POLY: [&[f64]; 11] = [
    &[0.0],
    &[1.0],
    &[0.0, 2.0],
    &[2.0, 0.0, -2.0],
    &[0.0, 10.0, 0.0, -4.0],
    &[8.0, 0.0, -18.0, 0.0, 4.0],
    &[0.0, 66.0, 0.0, -56.0, 0.0, 8.0],
    &[48.0, 0.0, -174.0, 0.0, 80.0, 0.0, -8.0],
    &[0.0, 558.0, 0.0, -740.0, 0.0, 216.0, 0.0, -16.0],
    &[384.0, 0.0, -1950.0, 0.0, 1380.0, 0.0, -280.0, 0.0, 16.0],
    &[0.0, 5790.0, 0.0, -10560.0, 0.0, 4704.0, 0.0, -704.0, 0.0, 32.0],
];

/// Denominator polynomials g_n = (−1)^{⌈n/2⌉} H_n / 2^{⌈n/2⌉}, ascending
/// powers. Their real zeros are the nodes of ψ_n.
const G_POLY: [&[f64]; 11] = [
    &[1.0],
    &[0.0, -1.0],
    &[1.0, 0.0, -2.0],
    &[0.0, -3.0, 0.0, 2.0],
    &[3.0, 0.0, -12.0, 0.0, 4.0],
    &[0.0, -15.0, 0.0, 20.0, 0.0, -4.0],
    &[15.0, 0.0, -90.0, 0.0, 60.0, 0.0, -8.0],
    &[0.0, -105.0, 0.0, 210.0, 0.0, -84.0, 0.0, 8.0],
    &[105.0, 0.0, -840.0, 0.0, 840.0, 0.0, -224.0, 0.0, 16.0],
    &[0.0, -945.0, 0.0, 2520.0, 0.0, -1512.0, 0.0, 288.0, 0.0, -16.0],
    &[945.0, 0.0, -9450.0, 0.0, 12600.0, 0.0, -5040.0, 0.0, 720.0, 0.0, -32.0],
];

/// The Wronskian constant c_n = 2^{n+1} n! / 4^{⌈n/2⌉} (always an integer
/// for the tabulated orders).
fn identity_constant(n: usize) -> f64 {
    let mut fact = 1u128;
    for k in 2..=n as u128 {
        fact *= k;
    }
    ((1u128 << (n + 1)) * fact / 4u128.pow(n.div_ceil(2) as u32)) as f64
}

/// Error-free transformation of a sum: s + e = a + b exactly.
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Error-free transformation of a product via fused multiply-add:
/// p + e = a·b exactly.
fn two_product(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    let e = a.mul_add(b, -p);
    (p, e)
}

/// Horner evaluation with a compensating error channel: the result is as
/// accurate as if the recurrence had run in twice the working precision.
/// `coeffs` are ascending powers.
fn compensated_horner(coeffs: &[f64], x: f64) -> f64 {
    let Some((&top, rest)) = coeffs.split_last() else {
        return 0.0;
    };
    let mut value = top;
    let mut err = 0.0f64;
    for &a in rest.iter().rev() {
        let (p, pe) = two_product(value, x);
        let (s, se) = two_sum(p, a);
        value = s;
        err = err.mul_add(x, pe + se);
    }
    value + err
}

/// Nodes of ψ_n for n ≤ 10, symmetrized so each ± pair is exactly opposite
/// and the odd-order origin node is exactly 0.
fn cached_nodes(n: usize) -> &'static [f64] {
    static NODES: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    let all = NODES.get_or_init(|| {
        (0..=MAX_ANALYTIC_N)
            .map(|m| {
                let mut roots =
                    hermite_roots(m).expect("Hermite root isolation cannot fail for m ≤ 10");
                let len = roots.len();
                for j in 0..len / 2 {
                    let mag = 0.5 * (roots[len - 1 - j] - roots[j]);
                    roots[j] = -mag;
                    roots[len - 1 - j] = mag;
                }
                if len % 2 == 1 {
                    roots[len / 2] = 0.0;
                }
                roots
            })
            .collect()
    });
    &all[n]
}

fn check_order(n: usize) -> Result<()> {
    if n > MAX_ANALYTIC_N {
        return Err(Error::Invalid(format!(
            "closed-form phase polynomials are tabulated for n ≤ {MAX_ANALYTIC_N}, got n = {n}"
        )));
    }
    Ok(())
}

/// The bracket f_n/g_n + 2D(x) that multiplies e^{x²}/√π in the tangent.
/// ±∞ exactly at a node (where g_n = 0); the sign is then decided by the
/// rounding of g_n's zero, which costs at most one branch of atan at a
/// single representable point.
fn direct_bracket(n: usize, x: f64) -> f64 {
    let f = compensated_horner(F_POLY[n], x);
    let g = compensated_horner(G_POLY[n], x);
    f / g + 2.0 * dawson(x)
}

/// T_n(x) for x ≥ 0, switching to the quadrature continuation past the
/// handoff point.
fn tangent_nonnegative(n: usize, x: f64) -> Result<f64> {
    let direct = |t: f64| (t * t).exp() / SQRT_PI * direct_bracket(n, t);
    if n == 0 {
        // f_0 = 0: no cancellation anywhere, the bracket is 2D exactly.
        return Ok(direct(x));
    }
    let handoff = cached_nodes(n).last().copied().unwrap_or(0.0) + HANDOFF_MARGIN;
    if x <= handoff {
        return Ok(direct(x));
    }
    // T′ = c_n e^{t²} / (√π g_n²): positive, smooth, and free of poles
    // right of the last node, so the continuation never cancels.
    let c_n = identity_constant(n);
    let spec = QuadratureSpec {
        abs_tol: 1e-14,
        rel_tol: 1e-12,
        ..QuadratureSpec::default()
    };
    let grown = integrate_adaptive(
        |t| {
            let g = compensated_horner(G_POLY[n], t);
            c_n * (t * t).exp() / (SQRT_PI * g * g)
        },
        handoff,
        x,
        spec,
    )?;
    Ok(direct(handoff) + grown.value)
}

/// The branch-free tangent combination T_n(x): tan s for even n, −cot s
/// for odd n. Odd in x. Runs off to ∓∞ as x approaches a node from the
/// left/right, and to ±∞ as x → ±∞.
pub fn ho_phase_tangent(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    if x < 0.0 {
        return Ok(-tangent_nonnegative(n, -x)?);
    }
    tangent_nonnegative(n, x)
}

/// The unwrapped bipolar phase s(x) of the n-th harmonic-oscillator state
/// in natural units (m = ω = ħ = 1) at flux F = 1/(2π), anchored so
/// s(0) = 0. Odd in x, strictly increasing, with limits ±(n+1)π/2.
///
/// Branch bookkeeping: s = kπ + δ_n + atan(T_n), where δ_n is 0 for even
/// and π/2 for odd n, and the winding k counts nodes crossed since the
/// anchor. A node located at y contributes to k(x) when y ≤ x, matching
/// the tangent's sign convention on either side of the node.
pub fn ho_action_analytic(n: usize, x: f64) -> Result<f64> {
    check_order(n)?;
    if x < 0.0 {
        // The phase is exactly odd; evaluating on |x| makes that bit-true.
        return Ok(-ho_action_analytic(n, -x)?);
    }
    let asymptote = (n as f64 + 1.0) * FRAC_PI_2;
    if x >= ASYMPTOTE_CUT {
        return Ok(asymptote);
    }
    if n % 2 == 1 && x == 0.0 {
        // Anchor sits exactly on the origin node for odd states.
        return Ok(0.0);
    }
    let tangent = tangent_nonnegative(n, x)?;
    let nodes = cached_nodes(n);
    let below = nodes.iter().filter(|&&r| r <= x).count() as i64;
    // Nodes at or left of the anchor x = 0: n/2 for even n (none at the
    // origin), (n+1)/2 for odd n (origin node included).
    let anchor = (n as i64 + 1) / 2;
    let winding = (below - anchor) as f64;
    let delta = if n.is_multiple_of(2) { 0.0 } else { FRAC_PI_2 };
    Ok(winding * PI + delta + tangent.atan())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenstates::hermite::hermite;
    use crate::numerics::erfi;

    /// d/dx of an ascending-coefficient polynomial.
    fn poly_derivative(coeffs: &[f64]) -> Vec<f64> {
        coeffs
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, &a)| j as f64 * a)
            .collect()
    }

    #[test]
    fn identity_constants_match_frozen_integers() {
        let frozen = [
            2.0, 1.0, 4.0, 6.0, 48.0, 120.0, 1440.0, 5040.0, 80640.0, 362880.0, 7257600.0,
        ];
        for (n, &c) in frozen.iter().enumerate() {
            assert_eq!(identity_constant(n), c, "c_{n}");
        }
    }

    /// The defining property of every (f_n, g_n) pair: the Wronskian-style
    /// combination collapses to the constant c_n. This is exact polynomial
    /// algebra, so it must hold at every sample point to rounding error.
    #[test]
    fn wronskian_identity_pins_every_order() {
        for n in 0..=MAX_ANALYTIC_N {
            let f = F_POLY[n];
            let g = G_POLY[n];
            let df = poly_derivative(f);
            let dg = poly_derivative(g);
            let c_n = identity_constant(n);
            for k in 0..=60 {
                let x = -3.0 + 0.1 * k as f64;
                let fv = compensated_horner(f, x);
                let gv = compensated_horner(g, x);
                let dfv = compensated_horner(&df, x);
                let dgv = compensated_horner(&dg, x);
                let combo = (2.0 * x * fv + dfv) * gv - fv * dgv + 2.0 * gv * gv;
                let scale = c_n.max(2.0 * gv * gv).max((fv * dgv).abs());
                assert!(
                    (combo - c_n).abs() <= 1e-12 * scale,
                    "identity violated at n = {n}, x = {x}: {combo} vs {c_n}"
                );
            }
        }
    }

    #[test]
    fn denominators_are_rescaled_hermite_polynomials() {
        for (n, poly) in G_POLY.iter().enumerate() {
            let half_up = n.div_ceil(2);
            let scale = (-1.0f64).powi(half_up as i32) / 4.0f64.powi(half_up as i32).sqrt();
            for k in 0..=40 {
                let x = -2.0 + 0.1 * k as f64;
                let expected = scale * hermite(n, x);
                let got = compensated_horner(poly, x);
                assert!(
                    (got - expected).abs() <= 1e-12 * (1.0 + expected.abs()),
                    "g_{n}({x}) = {got}, rescaled Hermite gives {expected}"
                );
            }
        }
    }

    /// The identity forces the leading coefficients to cancel pairwise:
    /// a_{n−1} = −b_n.
    #[test]
    fn leading_coefficients_are_linked() {
        for n in 1..=MAX_ANALYTIC_N {
            assert_eq!(F_POLY[n][n - 1], -G_POLY[n][n], "order {n}");
        }
    }

    /// f_n and g_n carry opposite parities: f_n only powers with j + n odd,
    /// g_n only powers with j + n even.
    #[test]
    fn coefficient_parity_structure() {
        for n in 0..=MAX_ANALYTIC_N {
            for (j, &a) in F_POLY[n].iter().enumerate() {
                if (j + n) % 2 == 0 {
                    assert_eq!(a, 0.0, "f_{n} coefficient x^{j}");
                }
            }
            for (j, &b) in G_POLY[n].iter().enumerate() {
                if (j + n) % 2 == 1 {
                    assert_eq!(b, 0.0, "g_{n} coefficient x^{j}");
                }
            }
        }
    }

    #[test]
    fn ground_state_tangent_is_erfi() {
        for k in 0..=50 {
            let x = -2.5 + 0.1 * k as f64;
            let t = ho_phase_tangent(0, x).unwrap();
            let reference = erfi(x);
            assert!(
                (t - reference).abs() <= 1e-12 * (1.0 + reference.abs()),
                "T_0({x}) = {t} vs erfi = {reference}"
            );
        }
    }

    /// Independent check of the normalization chain: the tangent's numeric
    /// derivative must equal c_n e^{x²}/(√π g_n²) — the κ/ψ_n² phase law.
    #[test]
    fn tangent_derivative_matches_phase_law() {
        for (n, x) in [(1usize, 0.8), (2, 0.3), (4, 1.3), (7, 1.1), (10, 0.45)] {
            let h = 1e-6;
            let tm = ho_phase_tangent(n, x - h).unwrap();
            let tp = ho_phase_tangent(n, x + h).unwrap();
            let numeric = (tp - tm) / (2.0 * h);
            let g = compensated_horner(G_POLY[n], x);
            let law = identity_constant(n) * (x * x).exp() / (SQRT_PI * g * g);
            assert!(
                (numeric - law).abs() <= 1e-6 * law,
                "n = {n}, x = {x}: dT/dx = {numeric}, phase law gives {law}"
            );
        }
    }

    #[test]
    fn phase_vanishes_at_the_anchor() {
        for n in 0..=MAX_ANALYTIC_N {
            assert_eq!(ho_action_analytic(n, 0.0).unwrap(), 0.0, "s_{n}(0)");
        }
    }

    #[test]
    fn phase_is_exactly_odd() {
        for n in 0..=MAX_ANALYTIC_N {
            for k in 1..=27 {
                let x = 0.17 * k as f64;
                let plus = ho_action_analytic(n, x).unwrap();
                let minus = ho_action_analytic(n, -x).unwrap();
                assert_eq!(plus, -minus, "s_{n}(±{x})");
            }
        }
    }

    /// The unwrapped phase is continuous and increasing through every node,
    /// where the tangent blows up and the winding picks up the slack.
    #[test]
    fn phase_is_continuous_across_nodes() {
        let h = 1e-6;
        for n in 1..=MAX_ANALYTIC_N {
            for &node in cached_nodes(n) {
                let left = ho_action_analytic(n, node - h).unwrap();
                let right = ho_action_analytic(n, node + h).unwrap();
                assert!(
                    right > left,
                    "phase not increasing across node {node} of n = {n}"
                );
                assert!(
                    right - left < 1e-3,
                    "phase jump {} across node {node} of n = {n}",
                    right - left
                );
            }
        }
    }

    /// The two evaluation regimes agree in the overlap zone just past the
    /// handoff, where the direct formula still has most of its digits.
    #[test]
    fn continuation_matches_direct_evaluation_past_handoff() {
        for n in 1..=MAX_ANALYTIC_N {
            let x = cached_nodes(n).last().unwrap() + HANDOFF_MARGIN + 0.02;
            let continued = tangent_nonnegative(n, x).unwrap();
            let direct = (x * x).exp() / SQRT_PI * direct_bracket(n, x);
            assert!(
                (continued - direct).abs() <= 1e-9 * (1.0 + direct.abs()),
                "n = {n}: continued tangent {continued}, direct {direct}"
            );
        }
    }

    #[test]
    fn phase_approaches_its_asymptote() {
        for n in 0..=MAX_ANALYTIC_N {
            let asym = (n as f64 + 1.0) * FRAC_PI_2;
            let near = ho_action_analytic(n, 7.99).unwrap();
            // Strictly below in exact arithmetic; allow rounding at the
            // ~1e-16 gaps of the fast-converging low orders.
            assert!(
                near <= asym * (1.0 + 1e-14),
                "phase overshot its limit: {near} vs {asym}"
            );
            assert!(
                asym - near < 1e-7,
                "n = {n}: asymptote gap {} at x = 7.99",
                asym - near
            );
            assert_eq!(ho_action_analytic(n, 8.0).unwrap(), asym);
            assert_eq!(ho_action_analytic(n, -8.0).unwrap(), -asym);
        }
    }

    /// Spot values frozen from a 50-digit evaluation of the same closed
    /// form (polynomials as exact integers, erfi and atan at full
    /// precision, winding from exact Hermite roots). Digits beyond f64
    /// resolution are kept verbatim from that evaluation.
    #[allow(clippy::excessive_precision)]
    #[test]
    fn frozen_high_precision_values() {
        let cases = [
            (0, 1.0, 1.0260467641875660804),
            (0, -2.25, -1.5489347895983903804),
            (1, 0.5, 0.8757146132170590525),
            (1, 3.0, 3.1321681083387991641),
            (2, 1.3, 2.7748115507408211452),
            (2, -0.7, -1.5555083515445586997),
            (3, 0.9, 2.3478826317695945252),
            (3, 5.0, 6.2831833885267482603),
            (4, 0.5, 1.4976922975001940713),
            (4, 2.0, 5.5558273412507381936),
            (5, 1.7, 5.3973496621359964342),
            (5, 2.1, 6.4930685161933316072),
            (6, 3.7, 10.579071413378358317),
            (7, 2.0, 7.3991425888183168282),
            (7, -4.1, -12.280984759982157399),
            (8, 0.25, 1.0310332619151351031),
            (8, 3.2, 11.748299838908347174),
            (9, 4.2, 14.953671608303588306),
            (10, 0.6, 2.7432553575866873773),
            (10, 2.5, 10.869926122534510900),
            (10, 3.5, 14.330530531693035967),
            (10, 3.7, 14.906035145683478236),
            (10, 4.5, 16.638915357970807693),
            (10, -4.75, -16.948535899237788043),
            (10, 5.0, 17.139094316905016061),
        ];
        for (n, x, reference) in cases {
            let s = ho_action_analytic(n, x).unwrap();
            assert!(
                (s - reference).abs() <= 1e-10,
                "s_{n}({x}) = {s:.15}, reference {reference:.15}, err {:.2e}",
                (s - reference).abs()
            );
        }
    }

    /// The far-band bracket really is a deep cancellation — the reason the
    /// tangent is continued by quadrature past the node span rather than
    /// assembled from its two direct pieces.
    #[test]
    fn far_band_bracket_cancels_deeply() {
        let bracket = direct_bracket(10, 5.0);
        let ratio = bracket.abs() / (2.0 * dawson(5.0));
        assert!(
            ratio < 1e-8,
            "expected ≥ 8 cancelled digits at n = 10, x = 5, got ratio {ratio:.2e}"
        );
    }

    #[test]
    fn orders_beyond_the_table_are_rejected() {
        let err = ho_action_analytic(11, 1.0).unwrap_err();
        assert!(
            matches!(err, Error::Invalid(ref msg) if msg.contains("n ≤ 10")),
            "unexpected error: {err}"
        );
        assert!(ho_phase_tangent(42, 0.3).is_err());
    }
}
