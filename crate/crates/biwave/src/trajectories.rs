//! Trajectory propagation on the modified potential, on the bare
//! potential, and (trivially) in the unipolar picture.
//!
//! A bipolar trajectory obeys Newtonian dynamics on the modified
//! potential u(x) = E − p²(x)/2m:
//!
//! ```text
//! ẋ = p/m,    ṗ = −u′(x) = p_LM(x)·p_LM′(x)/m
//! ```
//!
//! with the force taken from the decomposition's closed-form momentum
//! derivative, not a finite difference. Because the launch point sits on
//! the Lagrangian manifold (p₀ = p_LM(x₀)) and h = p²/2m + u(x) is
//! conserved, the trajectory stays glued to the manifold for all time:
//! p(t) = p_LM(x(t)) up to integrator error, and x(t) increases
//! strictly — the positive-momentum sheet covers the whole line, so the
//! walker heads to the right forever, slowing exponentially in the
//! forbidden region but never stopping or turning.
//!
//! Semiclassical trajectories run the same integrator on the bare
//! potential V(x); turning points need no special casing, since the
//! force representation carries the momentum smoothly through p = 0.
//!
//! Unipolar trajectories are propagated exactly, with no integrator at
//! all: the velocity field is the phase gradient S′(x)/m, and S ≡ 0 for
//! a real stationary state. They do not move. The
//! [`unipolar_stationarity_check`] verifies the flip side of that coin —
//! the modified potential U = V + Q is the constant E, so the force
//! vanishes identically too.
//!
//! Each propagated trajectory records per-step diagnostics: the maximum
//! distance from its manifold, max |p(t) − p_LM(x(t))|, and the relative
//! drift of the conserved energy h.

use std::fmt;

use crate::bipolar::BipolarDecomposition;
use crate::eigenstates::Eigenstate;
use crate::error::{Error, Result};
use crate::numerics::{find_root, rk4_step};
use crate::potentials::Potential;
use crate::semiclassical::orbit_for_state;
use crate::unipolar::unipolar_of;

/// Which dynamical law generated a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryLaw {
    /// ẋ = p/m, ṗ = −u′(x) on the bipolar modified potential.
    BipolarQuantum,
    /// ẋ = p/m, ṗ = −V′(x) on the bare potential.
    Semiclassical,
    /// ẋ = S′/m ≡ 0: exact stationarity.
    Unipolar,
}

impl fmt::Display for TrajectoryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrajectoryLaw::BipolarQuantum => write!(f, "bipolar-quantum"),
            TrajectoryLaw::Semiclassical => write!(f, "semiclassical"),
            TrajectoryLaw::Unipolar => write!(f, "unipolar"),
        }
    }
}

/// Initial momentum sheet for classical propagation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sheet {
    /// Launch with p = +√(2m(E−V)).
    Positive,
    /// Launch with p = −√(2m(E−V)).
    Negative,
}

impl Sheet {
    fn sign(self) -> f64 {
        match self {
            Sheet::Positive => 1.0,
            Sheet::Negative => -1.0,
        }
    }
}

/// One recorded phase-space point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySample {
    /// Time since launch.
    pub t: f64,
    /// Position.
    pub x: f64,
    /// Momentum.
    pub p: f64,
}

/// A propagated trajectory with its diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    law: TrajectoryLaw,
    energy: f64,
    samples: Vec<TrajectorySample>,
    max_lm_deviation: f64,
    energy_drift: f64,
}

impl Trajectory {
    /// The dynamical law that generated this trajectory.
    pub fn law(&self) -> TrajectoryLaw {
        self.law
    }

    /// Conserved energy reference h₀ = p₀²/2m + u(x₀) (or V, or E).
    pub fn energy(&self) -> f64 {
        self.energy
    }

    /// Recorded samples; `t` is strictly increasing.
    pub fn samples(&self) -> &[TrajectorySample] {
        &self.samples
    }

    /// Launch point.
    pub fn start(&self) -> TrajectorySample {
        self.samples[0]
    }

    /// Final recorded point.
    pub fn end(&self) -> TrajectorySample {
        *self.samples.last().expect("trajectories are never empty")
    }

    /// Total propagated time.
    pub fn duration(&self) -> f64 {
        self.end().t - self.start().t
    }

    /// Maximum observed |p(t) − p_manifold(x(t))| along the run.
    pub fn max_lm_deviation(&self) -> f64 {
        self.max_lm_deviation
    }

    /// Maximum observed |h(t) − h₀| / max(1, |h₀|) along the run.
    pub fn energy_drift(&self) -> f64 {
        self.energy_drift
    }
}

/// Propagates a bipolar quantum trajectory from `x_start` on the
/// positive-momentum sheet for time `t_end` with base step `dt`.
///
/// The initial momentum is read off the manifold, p₀ = p(x_start). A
/// step that would cross the truncation boundary is resolved adaptively
/// down to the crossing itself, and the run aborts with
/// [`Error::LeftWindow`] carrying the exit time and position.
pub fn propagate_bipolar(
    decomp: &BipolarDecomposition,
    x_start: f64,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    validate_times(t_end, dt)?;
    let (w_lo, w_hi) = decomp.truncation_window();
    if !(x_start >= w_lo && x_start <= w_hi) {
        return Err(Error::Invalid(format!(
            "start {x_start} lies outside the truncation window ({w_lo}, {w_hi})"
        )));
    }

    let m = decomp.state().mass();
    let launch = decomp.eval(x_start)?;
    let h0 = launch.momentum * launch.momentum / (2.0 * m) + launch.modified_potential;

    // Stage evaluations outside the window are possible (the chain keeps
    // evaluating a little past it); a genuine failure surfaces as NaN and
    // is handled by the same halving loop as a window exit.
    let rhs = |_t: f64, y: &[f64; 2]| match decomp.eval(y[0]) {
        Ok(e) => [y[1] / m, e.momentum * e.momentum_slope / m],
        Err(_) => [f64::NAN, f64::NAN],
    };

    let inside = |y: &[f64; 2]| y.iter().all(|v| v.is_finite()) && y[0] >= w_lo && y[0] <= w_hi;

    let mut t = 0.0;
    let mut y = [x_start, launch.momentum];
    let mut samples = Vec::with_capacity((t_end / dt).ceil() as usize + 2);
    samples.push(TrajectorySample { t, x: y[0], p: y[1] });
    let mut max_dev = 0.0_f64;
    let mut drift = 0.0_f64;

    while t < t_end {
        let base = dt.min(t_end - t);
        let cand = rk4_step(&rhs, t, &y, base);
        let y_new = if inside(&cand) {
            t += base;
            cand
        } else {
            // The boundary is within one step: bisect the step size to
            // land just inside the window edge, record the last point,
            // and report the exit. The positive sheet cannot re-enter —
            // x increases monotonically — so the crossing is final.
            let (mut lo, mut hi) = (0.0_f64, base);
            for _ in 0..50 {
                let mid = 0.5 * (lo + hi);
                if inside(&rk4_step(&rhs, t, &y, mid)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if lo > 0.0 {
                let last = rk4_step(&rhs, t, &y, lo);
                samples.push(TrajectorySample { t: t + lo, x: last[0], p: last[1] });
            }
            let exit = samples.last().expect("at least the launch sample");
            return Err(Error::LeftWindow { t: exit.t, x: exit.x });
        };
        y = y_new;

        let e = decomp.eval(y[0])?;
        max_dev = max_dev.max((y[1] - e.momentum).abs());
        let h = y[1] * y[1] / (2.0 * m) + e.modified_potential;
        drift = drift.max((h - h0).abs() / h0.abs().max(1.0));
        samples.push(TrajectorySample { t, x: y[0], p: y[1] });
    }

    Ok(Trajectory {
        law: TrajectoryLaw::BipolarQuantum,
        energy: h0,
        samples,
        max_lm_deviation: max_dev,
        energy_drift: drift,
    })
}

/// Propagates a classical trajectory on `potential` at `energy` from
/// `x_start` on the chosen momentum sheet.
///
/// Turning points are crossed smoothly by the force law; the LM
/// deviation diagnostic compares |p(t)| against √(2m(E−V)) wherever the
/// point is classically allowed.
pub fn propagate_semiclassical(
    potential: &Potential,
    mass: f64,
    energy: f64,
    x_start: f64,
    sheet: Sheet,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    validate_times(t_end, dt)?;
    if !(mass.is_finite() && mass > 0.0) {
        return Err(Error::Invalid(format!("mass must be positive, got {mass}")));
    }
    let gap = energy - potential.value(x_start);
    if !(gap >= 0.0) {
        return Err(Error::Invalid(format!(
            "start {x_start} is classically forbidden at energy {energy}"
        )));
    }

    let p0 = sheet.sign() * (2.0 * mass * gap).sqrt();
    let rhs = |_t: f64, y: &[f64; 2]| [y[1] / mass, -potential.derivative(y[0])];

    let n_steps = (t_end / dt).ceil().max(1.0) as usize;
    let mut t = 0.0;
    let mut y = [x_start, p0];
    let mut samples = Vec::with_capacity(n_steps + 2);
    samples.push(TrajectorySample { t, x: y[0], p: y[1] });
    let mut max_dev = 0.0_f64;
    let mut drift = 0.0_f64;

    for k in 0..n_steps {
        let t_next = if k + 1 == n_steps { t_end } else { (k + 1) as f64 * dt };
        y = rk4_step(&rhs, t, &y, t_next - t);
        t = t_next;
        let v = potential.value(y[0]);
        if energy >= v {
            let p_cl = (2.0 * mass * (energy - v)).sqrt();
            max_dev = max_dev.max((y[1].abs() - p_cl).abs());
        }
        let h = y[1] * y[1] / (2.0 * mass) + v;
        drift = drift.max((h - energy).abs() / energy.abs().max(1.0));
        samples.push(TrajectorySample { t, x: y[0], p: y[1] });
    }

    Ok(Trajectory {
        law: TrajectoryLaw::Semiclassical,
        energy,
        samples,
        max_lm_deviation: max_dev,
        energy_drift: drift,
    })
}

/// Propagates a unipolar quantum trajectory: exactly, because there is
/// nothing to integrate. The Bohmian velocity field is S′(x)/m and the
/// unipolar phase vanishes identically, so the trajectory sits at its
/// launch point with zero momentum for all time.
pub fn propagate_unipolar(state: &Eigenstate, x_start: f64, t_end: f64) -> Result<Trajectory> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Invalid(format!("end time must be positive, got {t_end}")));
    }
    if !x_start.is_finite() {
        return Err(Error::Invalid(format!("start must be finite, got {x_start}")));
    }
    let count = 101;
    let samples = (0..count)
        .map(|k| TrajectorySample {
            t: t_end * k as f64 / (count - 1) as f64,
            x: x_start,
            p: 0.0,
        })
        .collect();
    Ok(Trajectory {
        law: TrajectoryLaw::Unipolar,
        energy: state.energy(),
        samples,
        max_lm_deviation: 0.0,
        energy_drift: 0.0,
    })
}

/// Outcome of the unipolar stationarity check.
#[derive(Debug, Clone)]
pub struct UnipolarReport {
    /// Eigenstate energy E, the value U must equal.
    pub energy: f64,
    /// max |U(x) − E| over the sampled grid.
    pub max_deviation: f64,
    /// Tolerance the deviation was held to.
    pub tolerance: f64,
    /// Whether the deviation stayed within tolerance.
    pub passed: bool,
}

impl fmt::Display for UnipolarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{:<28} {:>13.6e} (tol {:>9.3e}) {}",
            "unipolar stationarity",
            self.max_deviation,
            self.tolerance,
            if self.passed { "pass" } else { "FAIL" }
        )
    }
}

/// Verifies that the unipolar modified potential U = V + Q is the
/// constant E across the classically allowed region and its flanks —
/// zero force, hence stationary trajectories from any start.
///
/// The grid spans the allowed region widened by half its width on each
/// side (clipped to the interior of a tabulated state's box). Analytic
/// states are held to 1e-8·max(1, |E|); shot states, whose third
/// derivative rides on an interpolant, to 1e-6·max(1, |E|).
pub fn unipolar_stationarity_check(state: &Eigenstate, grid_points: usize) -> Result<UnipolarReport> {
    if grid_points < 2 {
        return Err(Error::Invalid(format!(
            "stationarity grid needs at least 2 points, got {grid_points}"
        )));
    }
    let orbit = orbit_for_state(state)?;
    let (t_lo, t_hi) = orbit.turning_points();
    let half = 0.5 * (t_hi - t_lo);
    let mut lo = t_lo - half;
    let mut hi = t_hi + half;
    if state.is_tabulated() {
        let (d_lo, d_hi) = state.domain();
        let inset = 0.02 * (d_hi - d_lo);
        lo = lo.max(d_lo + inset);
        hi = hi.min(d_hi - inset);
    }

    let u = unipolar_of(state);
    let e = state.energy();
    let mut max_dev = 0.0_f64;
    for k in 0..grid_points {
        let x = lo + (hi - lo) * k as f64 / (grid_points - 1) as f64;
        max_dev = max_dev.max((u.modified_potential(x) - e).abs());
    }

    let tol_scale = if state.is_tabulated() { 1e-6 } else { 1e-8 };
    let tolerance = tol_scale * e.abs().max(1.0);
    Ok(UnipolarReport {
        energy: e,
        max_deviation: max_dev,
        tolerance,
        passed: max_dev <= tolerance,
    })
}

/// Cross-validates the force-based law against the direct flow
/// ẋ = p_LM(x)/m, which is equivalent because the manifold is invariant.
/// Returns the maximum position discrepancy over the run.
pub fn flow_equivalence(
    decomp: &BipolarDecomposition,
    x_start: f64,
    t_end: f64,
) -> Result<f64> {
    let dt = 1e-3;
    let force = propagate_bipolar(decomp, x_start, t_end, dt)?;

    let m = decomp.state().mass();
    let rhs = |_t: f64, y: &[f64; 1]| match decomp.momentum(y[0]) {
        Ok(p) => [p / m],
        Err(_) => [f64::NAN],
    };

    // Follow the force run's own (possibly boundary-shortened) time grid
    // so positions compare at identical times.
    let mut y = [x_start];
    let mut max_diff = 0.0_f64;
    let mut prev_t = 0.0;
    for s in &force.samples()[1..] {
        y = rk4_step(&rhs, prev_t, &y, s.t - prev_t);
        if !y[0].is_finite() {
            return Err(Error::Numerical(format!(
                "flow integration failed near x = {}",
                s.x
            )));
        }
        prev_t = s.t;
        max_diff = max_diff.max((y[0] - s.x).abs());
    }
    Ok(max_diff)
}

/// Picks `count` launch positions equally spaced in action s rather than
/// in position, giving uniform coverage of the manifold: equal-s walkers
/// bunch up in x wherever the momentum is small, which is exactly the
/// pile-up structure worth visualizing.
pub fn ensemble_starts(decomp: &BipolarDecomposition, count: usize) -> Result<Vec<f64>> {
    if count == 0 {
        return Err(Error::Invalid("ensemble needs at least one start".into()));
    }
    let (w_lo, w_hi) = decomp.truncation_window();
    let s_lo = decomp.action(w_lo)?;
    let s_hi = decomp.action(w_hi)?;
    let mut starts = Vec::with_capacity(count);
    for k in 0..count {
        let target = s_lo + (s_hi - s_lo) * (k + 1) as f64 / (count + 1) as f64;
        // The action is strictly increasing, so each level set is a
        // single point; bisection on s(x) − target cannot miss it.
        let x = find_root(
            |x| decomp.action(x).map_or(f64::NAN, |s| s - target),
            w_lo,
            w_hi,
            1e-13,
        )?;
        starts.push(x);
    }
    Ok(starts)
}

fn validate_times(t_end: f64, dt: f64) -> Result<()> {
    if !(t_end.is_finite() && t_end > 0.0) {
        return Err(Error::Invalid(format!("end time must be positive, got {t_end}")));
    }
    if !(dt.is_finite() && dt > 0.0 && dt <= t_end) {
        return Err(Error::Invalid(format!(
            "step must be positive and no larger than the end time, got {dt}"
        )));
    }
    Ok(())
}
