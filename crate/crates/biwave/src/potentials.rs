//! One-dimensional potential energy curves.
//!
//! A [`Potential`] is pure geometry — V(x) and its first two derivatives.
//! Mass and ħ live with the state being solved, so the same curve can serve
//! problems in different unit systems.
//!
//! Three families cover everything downstream:
//!
//! * [`Potential::Harmonic`] — V = ½kx², the analytic workhorse. Every
//!   closed-form result in the crate (exact eigenstates, closed-form wave
//!   decompositions) is exercised against it.
//! * [`Potential::Morse`] — V = D(1 − e^{−α(x−x_e)})², the standard
//!   anharmonic test bed: finitely many bound states, strongly asymmetric
//!   wells, and an exact spectrum to validate numerical solvers against.
//! * [`Potential::Tabulated`] — arbitrary sampled curves via cubic Hermite
//!   interpolation, for user-supplied potentials.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::CurveTable;

/// A one-dimensional potential energy curve with two derivatives.
#[derive(Debug, Clone)]
pub enum Potential {
    /// V(x) = ½ k x² with spring constant k > 0.
    Harmonic { k: f64 },
    /// V(x) = depth · (1 − e^{−alpha (x − x_e)})², depth > 0, alpha > 0.
    ///
    /// Zero at the minimum x_e, approaching the dissociation energy
    /// `depth` as x → +∞ and growing exponentially as x → −∞.
    Morse { depth: f64, alpha: f64, x_e: f64 },
    /// A sampled curve, interpolated by cubic Hermite segments.
    ///
    /// Shared behind `Arc` so states and decompositions can clone the
    /// potential freely without duplicating the table.
    Tabulated(Arc<CurveTable>),
}

impl Potential {
    /// Harmonic well V = ½kx².
    pub fn harmonic(k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::Invalid(format!(
                "harmonic spring constant must be positive and finite, got {k}"
            )));
        }
        Ok(Self::Harmonic { k })
    }

    /// Morse well V = depth(1 − e^{−alpha(x−x_e)})².
    pub fn morse(depth: f64, alpha: f64, x_e: f64) -> Result<Self> {
        if !(depth.is_finite() && depth > 0.0) {
            return Err(Error::Invalid(format!(
                "Morse well depth must be positive and finite, got {depth}"
            )));
        }
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(Error::Invalid(format!(
                "Morse range parameter must be positive and finite, got {alpha}"
            )));
        }
        if !x_e.is_finite() {
            return Err(Error::Invalid(format!(
                "Morse minimum position must be finite, got {x_e}"
            )));
        }
        Ok(Self::Morse { depth, alpha, x_e })
    }

    /// Potential from a sampled curve.
    pub fn tabulated(table: CurveTable) -> Self {
        Self::Tabulated(Arc::new(table))
    }

    /// V(x).
    ///
    /// Tabulated curves panic outside their sampled domain; callers that
    /// accept user-defined domains must check [`Potential::domain`] first.
    pub fn value(&self, x: f64) -> f64 {
        match self {
            Self::Harmonic { k } => 0.5 * k * x * x,
            Self::Morse { depth, alpha, x_e } => {
                let w = 1.0 - (-alpha * (x - x_e)).exp();
                depth * w * w
            }
            Self::Tabulated(t) => t
                .value(x)
                .expect("tabulated potential evaluated outside its domain"),
        }
    }

    /// dV/dx.
    pub fn derivative(&self, x: f64) -> f64 {
        match self {
            Self::Harmonic { k } => k * x,
            Self::Morse { depth, alpha, x_e } => {
                let e = (-alpha * (x - x_e)).exp();
                2.0 * depth * alpha * e * (1.0 - e)
            }
            Self::Tabulated(t) => t
                .derivative(x)
                .expect("tabulated potential evaluated outside its domain"),
        }
    }

    /// d²V/dx².
    pub fn second_derivative(&self, x: f64) -> f64 {
        match self {
            Self::Harmonic { k } => *k,
            Self::Morse { depth, alpha, x_e } => {
                let e = (-alpha * (x - x_e)).exp();
                2.0 * depth * alpha * alpha * e * (2.0 * e - 1.0)
            }
            Self::Tabulated(t) => t
                .second_derivative(x)
                .expect("tabulated potential evaluated outside its domain"),
        }
    }

    /// Domain on which the potential may be evaluated, if restricted.
    ///
    /// Analytic potentials return `None` (valid everywhere); tabulated
    /// curves return their sampled interval.
    pub fn domain(&self) -> Option<(f64, f64)> {
        match self {
            Self::Tabulated(t) => Some(t.domain()),
            _ => None,
        }
    }

    /// A short human-readable tag for reports and output files.
    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::Harmonic { .. } => "harmonic",
            Self::Morse { .. } => "morse",
            Self::Tabulated(_) => "tabulated",
        }
    }
}

/// Number of bound states of a Morse well.
///
/// With λ = √(2 m · depth)/(alpha ħ), levels exist for n < λ − ½, so the
/// count is ⌊λ − ½⌋ + 1 (or zero when λ ≤ ½ — a well too shallow to bind
/// even a zero-point state).
pub fn morse_bound_count(depth: f64, alpha: f64, mass: f64, hbar: f64) -> usize {
    let lambda = (2.0 * mass * depth).sqrt() / (alpha * hbar);
    if lambda <= 0.5 {
        0
    } else {
        (lambda - 0.5).floor() as usize + 1
    }
}

/// Exact bound-state energy of a Morse well (measured from the well
/// minimum).
///
/// E_n = ħω₀(n + ½) − [ħω₀(n + ½)]²/(4·depth) with ω₀ = alpha √(2·depth/m).
/// Valid for n below [`morse_bound_count`].
pub fn morse_bound_energy(n: usize, depth: f64, alpha: f64, mass: f64, hbar: f64) -> f64 {
    let omega0 = alpha * (2.0 * depth / mass).sqrt();
    let a = hbar * omega0 * (n as f64 + 0.5);
    a - a * a / (4.0 * depth)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use proptest::prelude::*;

    #[test]
    fn harmonic_values_and_derivatives() {
        let v = Potential::harmonic(1.0).unwrap();
        assert_eq!(v.value(0.0), 0.0);
        assert_eq!(v.value(2.0), 2.0);
        assert_eq!(v.derivative(-3.0), -3.0);
        assert_eq!(v.second_derivative(17.0), 1.0);
    }

    #[test]
    fn morse_shape() {
        // D = 100, α = √2: the standard strongly anharmonic test well with
        // harmonic frequency ω₀ = α√(2D/m) = 20 at unit mass.
        let d = 100.0;
        let alpha = 2.0_f64.sqrt();
        let v = Potential::morse(d, alpha, 0.0).unwrap();
        // Minimum at x_e: zero value, zero slope, curvature 2Dα² = mω₀².
        assert_eq!(v.value(0.0), 0.0);
        assert_eq!(v.derivative(0.0), 0.0);
        assert_relative_eq!(v.second_derivative(0.0), 2.0 * d * alpha * alpha);
        assert_relative_eq!(v.second_derivative(0.0), 400.0);
        // Dissociation plateau on the soft side.
        assert_relative_eq!(v.value(20.0), d, max_relative = 1e-10);
        // Steep repulsive wall on the hard side.
        assert!(v.value(-2.0) > 10.0 * d);
    }

    #[test]
    fn morse_derivatives_match_finite_differences() {
        let v = Potential::morse(100.0, 2.0_f64.sqrt(), 0.3).unwrap();
        let h = 1e-5;
        // The second difference needs a wider step: at h = 1e-5 its
        // roundoff (ε·V/h²) would swamp the 1e-5 tolerance.
        let h2 = 1e-4;
        for &x in &[-0.8, -0.2, 0.45, 1.1, 2.7] {
            let fd1 = (v.value(x + h) - v.value(x - h)) / (2.0 * h);
            let fd2 = (v.value(x + h2) - 2.0 * v.value(x) + v.value(x - h2)) / (h2 * h2);
            assert_relative_eq!(v.derivative(x), fd1, max_relative = 1e-8);
            assert_relative_eq!(v.second_derivative(x), fd2, max_relative = 1e-5);
        }
    }

    #[test]
    fn morse_bound_count_examples() {
        // λ = √(2·1·100)/(√2·1) = 10 exactly: ten bound states, n = 0..9.
        assert_eq!(morse_bound_count(100.0, 2.0_f64.sqrt(), 1.0, 1.0), 10);
        // λ = 1/√2 ≈ 0.707: barely binds a single state.
        assert_eq!(morse_bound_count(0.5, 2.0_f64.sqrt(), 1.0, 1.0), 1);
        // λ ≈ 0.22: too shallow for any bound state.
        assert_eq!(morse_bound_count(0.1, 2.0, 1.0, 1.0), 0);
    }

    #[test]
    fn morse_spectrum_values() {
        // D = 100, α = √2, m = ħ = 1: E_n = 20(n+½) − (n+½)², from the
        // closed-form spectrum with ω₀ = 20.
        let (d, alpha) = (100.0, 2.0_f64.sqrt());
        for n in 0..10 {
            let expected = 20.0 * (n as f64 + 0.5) - (n as f64 + 0.5).powi(2);
            assert_relative_eq!(
                morse_bound_energy(n, d, alpha, 1.0, 1.0),
                expected,
                max_relative = 1e-14
            );
        }
        assert_relative_eq!(morse_bound_energy(4, d, alpha, 1.0, 1.0), 69.75);
        // The top level sits below dissociation, and the ladder is
        // monotone with shrinking gaps (anharmonicity).
        assert!(morse_bound_energy(9, d, alpha, 1.0, 1.0) < d);
        let gaps: Vec<f64> = (0..9)
            .map(|n| {
                morse_bound_energy(n + 1, d, alpha, 1.0, 1.0)
                    - morse_bound_energy(n, d, alpha, 1.0, 1.0)
            })
            .collect();
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn tabulated_matches_its_source() {
        let src = Potential::morse(100.0, 2.0_f64.sqrt(), 0.0).unwrap();
        let n = 2001;
        let (a, b) = (-1.5, 4.0);
        let grid: Vec<f64> = (0..n)
            .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
            .collect();
        let y: Vec<f64> = grid.iter().map(|&x| src.value(x)).collect();
        let dy: Vec<f64> = grid.iter().map(|&x| src.derivative(x)).collect();
        let tab = Potential::tabulated(CurveTable::with_derivatives(grid, y, dy).unwrap());
        for &x in &[-1.3, -0.4, 0.0, 0.77, 2.9, 3.99] {
            // Interpolation error scales with the local magnitude (the
            // repulsive wall reaches thousands), so compare with a floor.
            let scale = 1.0 + src.value(x).abs();
            assert_abs_diff_eq!(tab.value(x), src.value(x), epsilon = 2e-9 * scale);
            assert_abs_diff_eq!(tab.derivative(x), src.derivative(x), epsilon = 1e-6 * scale);
            // Curvature error of the cubic is O(h²) against the curvature
            // scale itself, not the value scale.
            let curv_scale = 1.0 + src.value(x).abs() + src.second_derivative(x).abs();
            assert_abs_diff_eq!(
                tab.second_derivative(x),
                src.second_derivative(x),
                epsilon = 1e-4 * curv_scale
            );
        }
        assert_eq!(tab.domain(), Some((-1.5, 4.0)));
        assert!(src.domain().is_none());
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        assert!(Potential::harmonic(0.0).is_err());
        assert!(Potential::harmonic(-1.0).is_err());
        assert!(Potential::harmonic(f64::NAN).is_err());
        assert!(Potential::morse(-5.0, 1.0, 0.0).is_err());
        assert!(Potential::morse(5.0, 0.0, 0.0).is_err());
        assert!(Potential::morse(5.0, 1.0, f64::INFINITY).is_err());
    }

    proptest! {
        /// The analytic Morse derivative agrees with a central difference
        /// across the whole parameter box, not just hand-picked spots.
        #[test]
        fn morse_derivative_is_consistent(
            depth in 1.0..200.0f64,
            alpha in 0.3..3.0f64,
            x in -1.0..3.0f64,
        ) {
            let v = Potential::morse(depth, alpha, 0.0).unwrap();
            let h = 1e-6;
            let fd = (v.value(x + h) - v.value(x - h)) / (2.0 * h);
            let scale = v.derivative(x).abs().max(depth * alpha * 1e-3);
            prop_assert!((v.derivative(x) - fd).abs() <= 1e-6 * scale);
        }
    }
}
