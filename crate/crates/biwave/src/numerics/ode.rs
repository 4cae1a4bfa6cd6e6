//! Initial-value integration with the classical fourth-order Runge–Kutta
//! scheme.
//!
//! The default mode takes fixed steps of size `dt`. With a local error
//! tolerance set, each step is checked by step-doubling (one full step
//! against two half steps) and recursively halved until the estimate passes;
//! a step that shrinks below `min_dt` aborts with
//! [`Error::StepUnderflow`](crate::error::Error::StepUnderflow). The final
//! step is shortened to land exactly on `t1`.

use crate::error::{Error, Result};

/// Step-size policy for [`integrate_ode`].
#[derive(Debug, Clone, Copy)]
pub struct StepControl {
    /// Base step size (must be positive).
    pub dt: f64,
    /// Optional local error tolerance per step (max-norm of the
    /// step-doubling estimate). `None` integrates with fixed steps.
    pub local_tol: Option<f64>,
    /// Smallest step allowed by the adaptive fallback.
    pub min_dt: f64,
    /// Record every k-th accepted base step (1 records them all).
    pub record_every: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            dt: 1e-3,
            local_tol: None,
            min_dt: 1e-12,
            record_every: 1,
        }
    }
}

/// Sampled solution of an initial-value problem.
#[derive(Debug, Clone)]
pub struct OdeSolution<const N: usize> {
    /// Sample times, starting at `t0` and ending exactly at `t1`.
    pub t: Vec<f64>,
    /// States at the sample times.
    pub y: Vec<[f64; N]>,
}

impl<const N: usize> OdeSolution<N> {
    /// Final state.
    pub fn last(&self) -> (f64, [f64; N]) {
        (*self.t.last().expect("solution is never empty"), *self.y.last().unwrap())
    }
}

/// One classical RK4 step of size `dt`.
pub fn rk4_step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    dt: f64,
) -> [f64; N] {
    let k1 = rhs(t, y);
    let mut ytmp = [0.0; N];
    for i in 0..N {
        ytmp[i] = y[i] + 0.5 * dt * k1[i];
    }
    let k2 = rhs(t + 0.5 * dt, &ytmp);
    for i in 0..N {
        ytmp[i] = y[i] + 0.5 * dt * k2[i];
    }
    let k3 = rhs(t + 0.5 * dt, &ytmp);
    for i in 0..N {
        ytmp[i] = y[i] + dt * k3[i];
    }
    let k4 = rhs(t + dt, &ytmp);
    let mut out = [0.0; N];
    for i in 0..N {
        out[i] = y[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Advances one base step, recursively halving while the step-doubling
/// error estimate exceeds `tol`.
fn controlled_step<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    rhs: &F,
    t: f64,
    y: &[f64; N],
    dt: f64,
    tol: f64,
    min_dt: f64,
) -> Result<[f64; N]> {
    let full = rk4_step(rhs, t, y, dt);
    let half = rk4_step(rhs, t, y, 0.5 * dt);
    let two_halves = rk4_step(rhs, t + 0.5 * dt, &half, 0.5 * dt);
    let mut err: f64 = 0.0;
    for i in 0..N {
        err = err.max((full[i] - two_halves[i]).abs());
    }
    if err <= tol {
        return Ok(two_halves);
    }
    if 0.5 * dt < min_dt {
        return Err(Error::StepUnderflow { t, dt: 0.5 * dt });
    }
    let mid = controlled_step(rhs, t, y, 0.5 * dt, tol, min_dt)?;
    controlled_step(rhs, t + 0.5 * dt, &mid, 0.5 * dt, tol, min_dt)
}

/// Integrates `dy/dt = rhs(t, y)` from `(t0, y0)` to `t1 >= t0`.
pub fn integrate_ode<const N: usize, F: Fn(f64, &[f64; N]) -> [f64; N]>(
    rhs: F,
    y0: [f64; N],
    t0: f64,
    t1: f64,
    ctrl: StepControl,
) -> Result<OdeSolution<N>> {
    // Negated form on purpose: a NaN step must fail validation.
    #[allow(clippy::neg_cmp_op_on_partial_ord)]
    if !(ctrl.dt > 0.0) {
        return Err(Error::Invalid(format!("step size must be positive (got {})", ctrl.dt)));
    }
    if ctrl.record_every == 0 {
        return Err(Error::Invalid("record_every must be at least 1".into()));
    }
    if t1 < t0 {
        return Err(Error::Invalid(format!("end time {t1} precedes start time {t0}")));
    }

    let total = t1 - t0;
    let n_steps = (total / ctrl.dt).ceil().max(1.0) as usize;
    let mut t = t0;
    let mut y = y0;
    let cap = n_steps / ctrl.record_every + 2;
    let mut ts = Vec::with_capacity(cap);
    let mut ys = Vec::with_capacity(cap);
    ts.push(t);
    ys.push(y);

    for k in 0..n_steps {
        // Land exactly on t1 at the final step.
        let t_next = if k + 1 == n_steps { t1 } else { t0 + (k + 1) as f64 * ctrl.dt };
        let dt = t_next - t;
        if dt <= 0.0 {
            break;
        }
        y = match ctrl.local_tol {
            Some(tol) => controlled_step(&rhs, t, &y, dt, tol, ctrl.min_dt)?,
            None => rk4_step(&rhs, t, &y, dt),
        };
        for yi in &y {
            if !yi.is_finite() {
                return Err(Error::Numerical(format!("non-finite state at t = {t_next}")));
            }
        }
        t = t_next;
        if (k + 1) % ctrl.record_every == 0 || k + 1 == n_steps {
            ts.push(t);
            ys.push(y);
        }
    }

    Ok(OdeSolution { t: ts, y: ys })
}
