//! Bound stationary states of one-dimensional wells.
//!
//! An [`Eigenstate`] bundles everything downstream layers need to know
//! about a solved bound state: the quantum number, energy, node positions,
//! and a backend that can evaluate ψ and its first three derivatives
//! anywhere in the state's domain.
//!
//! Two backends exist. Harmonic wells use the closed-form Hermite
//! solution, exact to machine precision — the reference everything else is
//! judged against. Any other well goes through the Numerov shooting solver
//! in [`shooting`], which produces a dense table accurate to the grid's
//! fourth-order budget.
//!
//! Derivatives beyond the first never come from differencing: tabulated
//! backends get ψ″ from the eigenvalue equation ψ″ = 2m(V−E)ψ/ħ² and ψ‴
//! from its derivative, so the high derivatives are exactly as good as ψ
//! itself.

pub mod hermite;
pub mod ho;
pub mod inverse;
pub mod shooting;

pub use ho::harmonic_state;
pub use inverse::{inverse_potential, SampledWave, WaveFunction};
pub use shooting::{level_in_window, solve_bound_state, ShootingSpec};

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::CurveTable;
use crate::potentials::Potential;

/// How an eigenstate evaluates its wavefunction.
#[derive(Debug, Clone)]
enum Backend {
    /// Closed-form harmonic-oscillator state: ψ = norm·H_n(scale·x)·e^{−(scale·x)²/2}.
    Harmonic { scale: f64, norm: f64 },
    /// Numerically solved state stored as a dense Hermite-interpolated table.
    Tabulated { psi: Arc<CurveTable> },
}

/// A normalized bound stationary state ψ_n of a one-dimensional well.
///
/// Cheap to clone: tabulated data is shared behind `Arc`.
#[derive(Debug, Clone)]
pub struct Eigenstate {
    n: usize,
    energy: f64,
    mass: f64,
    hbar: f64,
    potential: Potential,
    nodes: Vec<f64>,
    domain: (f64, f64),
    backend: Backend,
}

impl Eigenstate {
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn new_harmonic(
        n: usize,
        energy: f64,
        mass: f64,
        hbar: f64,
        potential: Potential,
        nodes: Vec<f64>,
        scale: f64,
        norm: f64,
    ) -> Self {
        Self {
            n,
            energy,
            mass,
            hbar,
            potential,
            nodes,
            domain: (f64::NEG_INFINITY, f64::INFINITY),
            backend: Backend::Harmonic { scale, norm },
        }
    }

    pub(crate) fn new_tabulated(
        n: usize,
        energy: f64,
        mass: f64,
        hbar: f64,
        potential: Potential,
        nodes: Vec<f64>,
        psi: CurveTable,
    ) -> Self {
        let domain = psi.domain();
        Self {
            n,
            energy,
            mass,
            hbar,
            potential,
            nodes,
            domain,
            backend: Backend::Tabulated { psi: Arc::new(psi) },
        }
    }

    /// Quantum number (= number of interior nodes).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenvalue E_n.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Particle mass.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Reduced Planck constant in the problem's units.
    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    /// The well this state belongs to.
    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    /// Interior node positions, ascending. Empty for the ground state.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Interval on which ψ may be evaluated. Analytic states report an
    /// infinite domain; tabulated states report their grid span.
    pub fn domain(&self) -> (f64, f64) {
        self.domain
    }

    /// ψ(x).
    pub fn psi(&self, x: f64) -> f64 {
        match &self.backend {
            Backend::Harmonic { scale, norm } => {
                let xi = scale * x;
                norm * hermite::hermite(self.n, xi) * (-0.5 * xi * xi).exp()
            }
            Backend::Tabulated { psi } => psi
                .value(x)
                .expect("eigenstate evaluated outside its tabulated domain"),
        }
    }

    /// dψ/dx.
    pub fn dpsi(&self, x: f64) -> f64 {
        match &self.backend {
            Backend::Harmonic { scale, norm } => {
                let xi = scale * x;
                let d = hermite::hermite_with_derivatives(self.n, xi);
                norm * scale * (d[1] - xi * d[0]) * (-0.5 * xi * xi).exp()
            }
            Backend::Tabulated { psi } => psi
                .derivative(x)
                .expect("eigenstate evaluated outside its tabulated domain"),
        }
    }

    /// ψ and dψ/dx together (one table lookup for tabulated states).
    pub fn psi_and_dpsi(&self, x: f64) -> (f64, f64) {
        match &self.backend {
            Backend::Harmonic { .. } => (self.psi(x), self.dpsi(x)),
            Backend::Tabulated { psi } => psi
                .value_and_derivative(x)
                .expect("eigenstate evaluated outside its tabulated domain"),
        }
    }

    /// d²ψ/dx².
    ///
    /// Harmonic states differentiate the Hermite form directly (so this is
    /// analytically independent of the eigenvalue equation and can be used
    /// to *test* it); tabulated states use ψ″ = 2m(V−E)ψ/ħ², which is the
    /// most accurate form available for a numerical solution.
    pub fn ddpsi(&self, x: f64) -> f64 {
        match &self.backend {
            Backend::Harmonic { scale, norm } => {
                let xi = scale * x;
                let d = hermite::hermite_with_derivatives(self.n, xi);
                let phi = d[2] - 2.0 * xi * d[1] + (xi * xi - 1.0) * d[0];
                norm * scale * scale * phi * (-0.5 * xi * xi).exp()
            }
            Backend::Tabulated { .. } => {
                let g = 2.0 * self.mass * (self.potential.value(x) - self.energy)
                    / (self.hbar * self.hbar);
                g * self.psi(x)
            }
        }
    }

    /// d³ψ/dx³.
    ///
    /// Tabulated states differentiate the eigenvalue equation:
    /// ψ‴ = 2m(V′ψ + (V−E)ψ′)/ħ².
    pub fn dddpsi(&self, x: f64) -> f64 {
        match &self.backend {
            Backend::Harmonic { scale, norm } => {
                let xi = scale * x;
                let d = hermite::hermite_with_derivatives(self.n, xi);
                let phi = d[3] - 3.0 * xi * d[2] + 3.0 * (xi * xi - 1.0) * d[1]
                    + xi * (3.0 - xi * xi) * d[0];
                norm * scale.powi(3) * phi * (-0.5 * xi * xi).exp()
            }
            Backend::Tabulated { .. } => {
                let (psi, dpsi) = self.psi_and_dpsi(x);
                let two_m = 2.0 * self.mass / (self.hbar * self.hbar);
                two_m
                    * (self.potential.derivative(x) * psi
                        + (self.potential.value(x) - self.energy) * dpsi)
            }
        }
    }

    /// The local wavevector-squared factor g(x) = 2m(V−E)/ħ², with
    /// ψ″ = g·ψ. Negative in the classically allowed region.
    pub fn schroedinger_g(&self, x: f64) -> f64 {
        2.0 * self.mass * (self.potential.value(x) - self.energy) / (self.hbar * self.hbar)
    }

    /// Whether the state is carried by an interpolation table (numeric
    /// pipeline) rather than a closed form. Consumers that expand ψ in
    /// local series use this to widen their switch-over radii, since an
    /// interpolant's derivatives carry grid-scale error.
    pub fn is_tabulated(&self) -> bool {
        matches!(self.backend, Backend::Tabulated { .. })
    }
}

/// Finds the zeros of a tabulated curve on [lo, hi] by scanning grid signs
/// and refining each bracket on the interpolant.
pub(crate) fn locate_nodes(table: &CurveTable, lo: f64, hi: f64) -> Result<Vec<f64>> {
    let grid = table.grid();
    let values = table.values();
    let mut nodes = Vec::new();
    for i in 0..grid.len() - 1 {
        if grid[i] < lo || grid[i + 1] > hi {
            continue;
        }
        let (a, b) = (values[i], values[i + 1]);
        if a == 0.0 {
            // Grid point exactly on a node; collapse to it unless the
            // previous bracket already produced it.
            if nodes.last().is_none_or(|&p: &f64| p < grid[i] - 1e-12) {
                nodes.push(grid[i]);
            }
            continue;
        }
        if a * b < 0.0 {
            let root = crate::numerics::find_root(
                |x| table.value(x).unwrap_or(f64::NAN),
                grid[i],
                grid[i + 1],
                1e-14,
            )
            .map_err(|e| Error::Numerical(format!("node refinement failed: {e}")))?;
            nodes.push(root);
        }
    }
    Ok(nodes)
}
