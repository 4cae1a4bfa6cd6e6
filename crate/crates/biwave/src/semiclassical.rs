//! Classical orbits and semiclassical reference objects.
//!
//! For a bound energy E in a single well, the classical motion is the
//! closed orbit between the turning points x_l, x_r where V = E. This
//! module computes the objects that the quantum decomposition is compared
//! against:
//!
//! * the Lagrangian manifold p(x) = ±√(2m(E − V(x))) — the curve in phase
//!   space that the quantum momentum field approaches for high quantum
//!   numbers;
//! * the enclosed action J(E) = ∮p·dx and the orbit period T(E) = dJ/dE;
//! * the semiclassical flux 1/T — the probability per unit time a
//!   classical ensemble member crosses any given point in one direction,
//!   which is the natural flux to assign each traveling wave;
//! * the median point of the orbit, splitting the one-way action in half —
//!   a canonical, symmetry-respecting anchor for phase integrals.
//!
//! Both action and period integrands have inverse-square-root endpoint
//! behavior. The substitution x = x_l + (x_r − x_l)sin²θ absorbs it: dx
//! contributes sin2θ, which cancels the endpoint zeros/poles and leaves an
//! analytic integrand that adaptive Gauss–Kronrod quadrature polishes off
//! at machine precision.

use crate::eigenstates::Eigenstate;
use crate::error::{Error, Result};
use crate::numerics::{find_root, integrate_adaptive, QuadratureSpec};
use crate::potentials::Potential;

/// A classical bound orbit at fixed energy.
#[derive(Debug, Clone)]
pub struct ClassicalOrbit {
    potential: Potential,
    mass: f64,
    energy: f64,
    turning: (f64, f64),
    action: f64,
    period: f64,
}

impl ClassicalOrbit {
    /// Finds the orbit of `potential` at `energy`, searching for the two
    /// turning points inside `search`.
    ///
    /// The well must be simple: exactly two crossings of V = E inside the
    /// search interval.
    pub fn new(
        potential: &Potential,
        mass: f64,
        energy: f64,
        search: (f64, f64),
    ) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::Invalid(format!("mass must be positive, got {mass}")));
        }
        let (lo, hi) = search;
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Invalid(format!(
                "turning-point search interval must be finite, got ({lo}, {hi})"
            )));
        }
        if let Some((p_lo, p_hi)) = potential.domain() {
            if lo < p_lo || hi > p_hi {
                return Err(Error::Invalid(format!(
                    "search interval ({lo}, {hi}) exceeds the tabulated potential's \
                     domain ({p_lo}, {p_hi})"
                )));
            }
        }

        let turning = turning_points(potential, energy, search)?;
        let (xl, xr) = turning;

        // One-way action ∫√(2m(E−V)) dx, then the loop doubles it.
        let half_action = endpoint_smoothed_integral(xl, xr, |x| {
            (2.0 * mass * stable_gap(potential, energy, x, turning)).sqrt()
        })?;
        // T = √(2m) ∫ dx/√(E−V). The integrand's endpoint poles are
        // cancelled by the substitution's sin2θ factor.
        let period = endpoint_smoothed_integral(xl, xr, |x| {
            let gap = stable_gap(potential, energy, x, turning);
            if gap == 0.0 {
                0.0
            } else {
                (2.0 * mass).sqrt() / gap.sqrt()
            }
        })?;

        Ok(Self {
            potential: potential.clone(),
            mass,
            energy,
            turning,
            action: 2.0 * half_action,
            period,
        })
    }

    /// Orbit energy.
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Classical turning points (x_l, x_r).
    pub fn turning_points(&self) -> (f64, f64) {
        self.turning
    }

    /// Enclosed action J = ∮p·dx (phase-space area of the orbit).
    pub fn action(&self) -> f64 {
        self.action
    }

    /// Orbit period T = dJ/dE.
    pub fn period(&self) -> f64 {
        self.period
    }

    /// Angular frequency ω = 2π/T.
    pub fn frequency(&self) -> f64 {
        2.0 * std::f64::consts::PI / self.period
    }

    /// Semiclassical one-way flux 1/T: a classical ensemble on this orbit
    /// streams past every interior point once per period in each
    /// direction, so each traveling wave carries probability flux 1/T.
    pub fn flux(&self) -> f64 {
        1.0 / self.period
    }

    /// Classical momentum magnitude at x, `None` in the forbidden region.
    pub fn momentum(&self, x: f64) -> Option<f64> {
        let gap = self.energy - self.potential.value(x);
        if gap >= 0.0 {
            Some((2.0 * self.mass * gap).sqrt())
        } else {
            None
        }
    }

    /// Cumulative one-way action ∫_{x_l}^{x} √(2m(E−V)) dx′ for x inside
    /// the orbit.
    pub fn cumulative_action(&self, x: f64) -> Result<f64> {
        let (xl, xr) = self.turning;
        if !(x >= xl && x <= xr) {
            return Err(Error::OutOfRange { x, lo: xl, hi: xr });
        }
        if x == xl {
            return Ok(0.0);
        }
        endpoint_smoothed_integral(xl, x, |t| {
            (2.0 * self.mass * stable_gap(&self.potential, self.energy, t, self.turning)).sqrt()
        })
    }

    /// The median point of the orbit: cumulative one-way action equals
    /// half the one-way total. Symmetric wells give their midpoint.
    pub fn median_point(&self) -> Result<f64> {
        let (xl, xr) = self.turning;
        let target = 0.25 * self.action; // half of the one-way action
        let width = xr - xl;
        find_root(
            |x| self.cumulative_action(x).unwrap_or(f64::NAN) - target,
            xl + 1e-9 * width,
            xr - 1e-9 * width,
            1e-12 * width,
        )
    }

    /// Samples the upper branch of the Lagrangian manifold on `n` points
    /// from turning point to turning point (inclusive, with p = 0 there).
    ///
    /// Abscissae are spaced as x = x_l + (x_r−x_l)sin²φ with uniform φ:
    /// near the turning points the curve has a vertical tangent, and this
    /// spacing keeps the sampling roughly uniform in *arclength* (for a
    /// harmonic well it is exactly uniform), so polyline distances stay
    /// accurate right up to the turning points.
    pub fn sample(&self, n: usize) -> LmCurve {
        let (xl, xr) = self.turning;
        let n = n.max(2);
        let mut xs = Vec::with_capacity(n);
        let mut ps = Vec::with_capacity(n);
        for i in 0..n {
            let phi = std::f64::consts::FRAC_PI_2 * i as f64 / (n - 1) as f64;
            let s = phi.sin();
            let x = xl + (xr - xl) * s * s;
            let gap = stable_gap(&self.potential, self.energy, x, self.turning);
            xs.push(x);
            ps.push((2.0 * self.mass * gap).sqrt());
        }
        LmCurve { x: xs, p: ps }
    }
}

/// A sampled Lagrangian manifold branch: the curve (x, +p_sc(x)). The
/// lower branch is its mirror image in the x-axis.
#[derive(Debug, Clone)]
pub struct LmCurve {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
}

impl LmCurve {
    /// Euclidean phase-space distance from the point (x, p) to the curve,
    /// using both branches (the curve is symmetric under p → −p).
    pub fn distance_to(&self, x: f64, p: f64) -> f64 {
        let p = p.abs();
        let mut best = f64::INFINITY;
        for i in 0..self.x.len() - 1 {
            let (ax, ay) = (self.x[i], self.p[i]);
            let (bx, by) = (self.x[i + 1], self.p[i + 1]);
            let (dx, dy) = (bx - ax, by - ay);
            let len2 = dx * dx + dy * dy;
            let t = if len2 == 0.0 {
                0.0
            } else {
                (((x - ax) * dx + (p - ay) * dy) / len2).clamp(0.0, 1.0)
            };
            let (cx, cy) = (ax + t * dx, ay + t * dy);
            best = best.min(((x - cx).powi(2) + (p - cy).powi(2)).sqrt());
        }
        best
    }
}

/// The two solutions of V(x) = E inside `search`, for a simple well.
pub fn turning_points(potential: &Potential, energy: f64, search: (f64, f64)) -> Result<(f64, f64)> {
    let (lo, hi) = search;
    const CELLS: usize = 4096;
    let h = (hi - lo) / CELLS as f64;
    let mut crossings = Vec::new();
    let mut prev = potential.value(lo) - energy;
    // Bracket with the exact floats that were scanned: recomputing the
    // left edge as x − h can land one ulp away, and when a turning point
    // sits that close to a cell edge the sign flips with it.
    let mut x_prev = lo;
    for i in 1..=CELLS {
        let x = lo + h * i as f64;
        let curr = potential.value(x) - energy;
        if prev * curr < 0.0 || (prev == 0.0 && curr != 0.0) {
            let root = find_root(|t| potential.value(t) - energy, x_prev, x, 1e-13 * (1.0 + h))?;
            crossings.push(root);
        }
        if curr != 0.0 {
            prev = curr;
            x_prev = x;
        }
    }
    match crossings.len() {
        2 => Ok((crossings[0], crossings[1])),
        0 => Err(Error::Invalid(format!(
            "no classical turning points in ({lo}, {hi}) at energy {energy}; \
             is the energy inside the well?"
        ))),
        k => Err(Error::Invalid(format!(
            "found {k} turning points in ({lo}, {hi}) at energy {energy}; \
             only simple single wells are supported"
        ))),
    }
}

/// The classical orbit underlying a bound eigenstate: same potential, mass,
/// and energy, with the turning-point search window chosen from the
/// potential's shape so callers don't have to guess one.
pub fn orbit_for_state(state: &Eigenstate) -> Result<ClassicalOrbit> {
    let potential = state.potential();
    let energy = state.energy();
    let search = match potential {
        Potential::Harmonic { k } => {
            // Turning points at ±√(2E/k); pad by 2× so the bracketing
            // scan has sign changes well inside the window.
            let x_t = (2.0 * energy / k).sqrt();
            (-2.0 * x_t, 2.0 * x_t)
        }
        Potential::Morse { depth, alpha, x_e } => {
            if energy >= *depth {
                return Err(Error::Invalid(format!(
                    "energy {energy} is at or above the Morse dissociation \
                     limit {depth}; no bound orbit exists"
                )));
            }
            // V = E at e^{−α(x−x_e)} = 1 ± √(E/D), solved in closed form.
            let ratio = (energy / depth).sqrt();
            let xl = x_e - (1.0 + ratio).ln() / alpha;
            let xr = x_e - (1.0 - ratio).ln() / alpha;
            let pad = 0.5 * (xr - xl).max(1.0 / alpha);
            (xl - pad, xr + pad)
        }
        Potential::Tabulated(_) => {
            let (p_lo, p_hi) = potential
                .domain()
                .expect("tabulated potentials always report a domain");
            let (s_lo, s_hi) = state.domain();
            (p_lo.max(s_lo), p_hi.min(s_hi))
        }
    };
    ClassicalOrbit::new(potential, state.mass(), energy, search)
}

/// The energy gap E − V(x), evaluated without turning-point cancellation.
///
/// Direct subtraction loses all precision as x approaches a turning point
/// (relative error ε·E/gap → O(1)), which would stall the orbit integrals
/// near 1e-8. Within a narrow collar of either turning point the gap is
/// instead taken from the second-order Taylor expansion of V around that
/// point, whose leading term −V′·δ carries no cancellation at all. The
/// collar (1e-5 of the orbit width) is wide enough that direct subtraction
/// is accurate outside it and narrow enough that the truncated cubic term
/// is negligible inside it.
fn stable_gap(potential: &Potential, energy: f64, x: f64, turning: (f64, f64)) -> f64 {
    let (xl, xr) = turning;
    let collar = 1e-5 * (xr - xl);
    let d_l = x - xl;
    let d_r = xr - x;
    let gap = if d_l < collar {
        -potential.derivative(xl) * d_l - 0.5 * potential.second_derivative(xl) * d_l * d_l
    } else if d_r < collar {
        potential.derivative(xr) * d_r - 0.5 * potential.second_derivative(xr) * d_r * d_r
    } else {
        energy - potential.value(x)
    };
    gap.max(0.0)
}

/// ∫_a^b f dx under x = a + (b−a)sin²θ, which regularizes inverse-sqrt
/// endpoint behavior of f (and costs nothing when f is already smooth).
fn endpoint_smoothed_integral(a: f64, b: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let width = b - a;
    let q = integrate_adaptive(
        |theta: f64| {
            let s = theta.sin();
            let x = a + width * s * s;
            f(x) * width * (2.0 * theta).sin()
        },
        0.0,
        std::f64::consts::FRAC_PI_2,
        QuadratureSpec::default(),
    )?;
    Ok(q.value)
}
