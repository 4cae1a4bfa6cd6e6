//! Recovering the potential from a known eigenstate.
//!
//! A nodeless region of any eigenfunction determines its well uniquely:
//! rearranging the eigenvalue equation,
//!
//! ```text
//! V(x) = E + (ħ²/2m) ψ″(x)/ψ(x)
//! ```
//!
//! This closes the loop for round-trip validation — solve a well for ψ,
//! then reconstruct the well from ψ alone and compare. It is also the
//! honest way to audit a numerical wavefunction: feeding *sampled values
//! only* (second derivative by finite differences) exposes the actual
//! solver error instead of assuming the eigenvalue equation held.

use crate::eigenstates::Eigenstate;

/// Anything that can report its value and curvature at a point.
pub trait WaveFunction {
    fn value(&self, x: f64) -> f64;
    fn second_derivative(&self, x: f64) -> f64;
}

impl WaveFunction for Eigenstate {
    fn value(&self, x: f64) -> f64 {
        self.psi(x)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        self.ddpsi(x)
    }
}

/// Adapter exposing a plain sampled function as a [`WaveFunction`], with
/// the curvature formed by a five-point central difference of width
/// `step`.
///
/// Use this when only ψ values are trustworthy — e.g. to audit a
/// numerically solved state without assuming it satisfies its own
/// eigenvalue equation.
pub struct SampledWave<F: Fn(f64) -> f64> {
    f: F,
    step: f64,
}

impl<F: Fn(f64) -> f64> SampledWave<F> {
    pub fn new(f: F, step: f64) -> Self {
        assert!(step > 0.0, "difference step must be positive, got {step}");
        Self { f, step }
    }
}

impl<F: Fn(f64) -> f64> WaveFunction for SampledWave<F> {
    fn value(&self, x: f64) -> f64 {
        (self.f)(x)
    }
    fn second_derivative(&self, x: f64) -> f64 {
        let h = self.step;
        let f = &self.f;
        (-f(x - 2.0 * h) + 16.0 * f(x - h) - 30.0 * f(x) + 16.0 * f(x + h) - f(x + 2.0 * h))
            / (12.0 * h * h)
    }
}

/// The potential value implied by a wavefunction at x.
///
/// Exact wherever ψ(x) ≠ 0; at a node both ψ and ψ″ vanish and the
/// quotient turns 0/0 (analytically finite, numerically hopeless), so
/// callers should sample away from nodes.
pub fn inverse_potential(wave: &impl WaveFunction, energy: f64, mass: f64, hbar: f64, x: f64) -> f64 {
    energy + hbar * hbar / (2.0 * mass) * wave.second_derivative(x) / wave.value(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigenstates::{harmonic_state, solve_bound_state, ShootingSpec};
    use crate::potentials::Potential;
    use approx::assert_abs_diff_eq;

    #[test]
    fn analytic_state_recovers_its_well_exactly() {
        let state = harmonic_state(3, 1.0, 1.0, 1.0).unwrap();
        // ψ_3 nodes sit at 0 and ±√1.5 ≈ ±1.22; sample well clear of them.
        for &x in &[-2.9, -0.61, 0.55, 1.9, 3.4] {
            let v = inverse_potential(&state, state.energy(), 1.0, 1.0, x);
            assert_abs_diff_eq!(v, 0.5 * x * x, epsilon = 1e-10);
        }
    }

    #[test]
    fn sampled_values_recover_the_well() {
        // Five-point curvature of exact ψ values: the reconstruction error
        // is pure finite-difference error, ~1e-10 at this step.
        let state = harmonic_state(2, 1.0, 1.0, 1.0).unwrap();
        let wave = SampledWave::new(|x| state.psi(x), 1e-3);
        for &x in &[-2.3, -1.4, 0.0, 1.1, 2.6] {
            let v = inverse_potential(&wave, state.energy(), 1.0, 1.0, x);
            assert_abs_diff_eq!(v, 0.5 * x * x, epsilon = 1e-7);
        }
    }

    #[test]
    fn numerov_solution_round_trips_to_its_potential() {
        // The full loop: well → shooting solver → sampled-ψ reconstruction
        // → well. Uses values only, so this measures true solver error.
        let v = Potential::harmonic(1.0).unwrap();
        let spec = ShootingSpec {
            domain: (-8.0, 8.0),
            step: Some(1e-3),
            energy_window: (2.2, 2.8),
            rel_tol: 1e-13,
        };
        let state = solve_bound_state(&v, 1.0, 1.0, 2, &spec).unwrap();
        // The difference step spans ten grid cells so it probes the
        // solution, not the interpolant's per-cell error wiggle.
        let wave = SampledWave::new(|x| state.psi(x), 1e-2);
        // ψ_2 nodes at ±1/√2 ≈ ±0.707; stay away from them and from the
        // far tails where ψ underflows.
        for &x in &[-2.2, -1.5, 0.0, 1.4, 2.3] {
            let recovered = inverse_potential(&wave, state.energy(), 1.0, 1.0, x);
            assert_abs_diff_eq!(recovered, 0.5 * x * x, epsilon = 1e-6);
        }
    }
}
