//! Closed-form harmonic-oscillator eigenstates.
//!
//! For V = ½kx² the normalized bound states are
//!
//! ```text
//! ψ_n(x) = (2ⁿ n!)^{-1/2} (mω/πħ)^{1/4} H_n(ξ) e^{-ξ²/2},   ξ = √(mω/ħ)·x
//! ```
//!
//! with ω = √(k/m) and E_n = ħω(n + ½). These states are exact to machine
//! precision and anchor every numerical cross-check in the crate: the
//! shooting solver, the wave decompositions, and the closed-form phase
//! tables are all validated against them.

use crate::eigenstates::{hermite, Eigenstate};
use crate::error::{Error, Result};
use crate::potentials::Potential;

/// The n-th harmonic-oscillator eigenstate of V = ½kx².
pub fn harmonic_state(n: usize, k: f64, mass: f64, hbar: f64) -> Result<Eigenstate> {
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Invalid(format!("mass must be positive, got {mass}")));
    }
    if !(hbar.is_finite() && hbar > 0.0) {
        return Err(Error::Invalid(format!("hbar must be positive, got {hbar}")));
    }
    let potential = Potential::harmonic(k)?;
    let omega = (k / mass).sqrt();
    let energy = hbar * omega * (n as f64 + 0.5);
    let scale = (mass * omega / hbar).sqrt();

    // (2ⁿ n!)^{-1/2} (mω/πħ)^{1/4}; the factorial product stays inside f64
    // range for every order the root isolator accepts.
    let mut two_n_fact = 1.0;
    for j in 1..=n {
        two_n_fact *= 2.0 * j as f64;
    }
    let norm = (scale * scale / std::f64::consts::PI).powf(0.25) / two_n_fact.sqrt();

    let nodes = hermite::hermite_roots(n)?
        .into_iter()
        .map(|xi| xi / scale)
        .collect();

    Ok(Eigenstate::new_harmonic(
        n, energy, mass, hbar, potential, nodes, scale, norm,
    ))
}
