//! Dense curve tables with cubic Hermite interpolation.
//!
//! A [`CurveTable`] stores a smooth function on a strictly increasing grid
//! and evaluates it (and its derivative) anywhere inside the grid by cubic
//! Hermite interpolation. When exact nodal derivatives are supplied the
//! interpolant is O(h⁴) accurate in value and O(h³) in slope; when only
//! values are available, nodal slopes are filled in by fourth-order finite
//! differences, which keeps the same value accuracy on smooth data.
//!
//! Tables are the bridge between expensive solvers (shooting eigenstates,
//! adaptive phase integrals) and the cheap per-point evaluations that
//! trajectory propagation needs. Everything downstream — including the
//! force felt by a trajectory — is derived from one table, so interpolation
//! error shows up as a slightly perturbed but perfectly self-consistent
//! model rather than as drift.

use crate::error::{Error, Result};

/// A sampled curve y(x) on a strictly increasing grid, with nodal slopes.
#[derive(Debug, Clone)]
pub struct CurveTable {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl CurveTable {
    /// Builds a table from matched samples of the value and its derivative.
    ///
    /// This is the preferred constructor: exact slopes give a genuinely
    /// C¹ interpolant whose derivative is trustworthy between knots.
    pub fn with_derivatives(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() || x.len() != dy.len() {
            return Err(Error::Invalid(format!(
                "curve table arrays must match: {} abscissae, {} values, {} slopes",
                x.len(),
                y.len(),
                dy.len()
            )));
        }
        Self::validate_grid(&x)?;
        for (label, v) in [("value", &y), ("slope", &dy)] {
            if let Some(bad) = v.iter().position(|t| !t.is_finite()) {
                return Err(Error::Invalid(format!(
                    "non-finite {label} sample at index {bad} (x = {})",
                    x[bad]
                )));
            }
        }
        Ok(Self { x, y, dy })
    }

    /// Builds a table from values alone, estimating nodal slopes by
    /// fourth-order finite differences (one-sided at the ends).
    ///
    /// Requires at least five points and a uniform grid; the solvers that
    /// use this path always sample uniformly.
    pub fn from_values(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::Invalid(format!(
                "curve table arrays must match: {} abscissae, {} values",
                x.len(),
                y.len()
            )));
        }
        if x.len() < 5 {
            return Err(Error::Invalid(format!(
                "need at least 5 samples for differenced slopes, got {}",
                x.len()
            )));
        }
        Self::validate_grid(&x)?;
        let n = x.len();
        let h = x[1] - x[0];
        let uniform = x
            .windows(2)
            .all(|w| ((w[1] - w[0]) - h).abs() <= 1e-9 * h.abs());
        if !uniform {
            return Err(Error::Invalid(
                "differenced slopes require a uniform grid; \
                 supply explicit derivatives for non-uniform data"
                    .into(),
            ));
        }
        let mut dy = vec![0.0; n];
        for i in 0..n {
            dy[i] = if i >= 2 && i + 2 < n {
                // Central five-point stencil, O(h⁴).
                (y[i - 2] - 8.0 * y[i - 1] + 8.0 * y[i + 1] - y[i + 2]) / (12.0 * h)
            } else if i < 2 {
                // Forward five-point stencil anchored at i.
                (-25.0 * y[i] + 48.0 * y[i + 1] - 36.0 * y[i + 2] + 16.0 * y[i + 3]
                    - 3.0 * y[i + 4])
                    / (12.0 * h)
            } else {
                (25.0 * y[i] - 48.0 * y[i - 1] + 36.0 * y[i - 2] - 16.0 * y[i - 3]
                    + 3.0 * y[i - 4])
                    / (12.0 * h)
            };
        }
        Self::with_derivatives(x, y, dy)
    }

    fn validate_grid(x: &[f64]) -> Result<()> {
        if x.len() < 2 {
            return Err(Error::Invalid(format!(
                "need at least 2 grid points, got {}",
                x.len()
            )));
        }
        if let Some(bad) = x.iter().position(|t| !t.is_finite()) {
            return Err(Error::Invalid(format!(
                "non-finite abscissa at index {bad}"
            )));
        }
        if let Some(w) = x.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Invalid(format!(
                "grid must be strictly increasing; x[{}] = {} >= x[{}] = {}",
                w,
                x[w],
                w + 1,
                x[w + 1]
            )));
        }
        Ok(())
    }

    /// Inclusive domain covered by the table.
    pub fn domain(&self) -> (f64, f64) {
        (self.x[0], *self.x.last().unwrap())
    }

    /// The raw grid abscissae.
    pub fn grid(&self) -> &[f64] {
        &self.x
    }

    /// The raw sampled values.
    pub fn values(&self) -> &[f64] {
        &self.y
    }

    /// The nodal slopes (exact or differenced, depending on constructor).
    pub fn slopes(&self) -> &[f64] {
        &self.dy
    }

    /// Index of the segment containing x, clamping exact-endpoint hits
    /// inward so evaluation at the domain edges works.
    fn segment(&self, x: f64) -> Result<usize> {
        let (lo, hi) = self.domain();
        if !(x >= lo && x <= hi) {
            return Err(Error::OutOfRange { x, lo, hi });
        }
        // partition_point returns the first index with x[i] > x, so the
        // containing segment starts one before it.
        let i = self.x.partition_point(|&t| t <= x);
        Ok(i.saturating_sub(1).min(self.x.len() - 2))
    }

    /// Interpolated value at x. Errors if x lies outside the table.
    pub fn value(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        Ok(h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1])
    }

    /// Interpolated derivative dy/dx at x.
    ///
    /// This is the exact derivative of the Hermite interpolant, so value
    /// and slope are consistent to machine precision — integrating the
    /// returned slope reproduces the returned values.
    pub fn derivative(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (d00, d10, d01, d11) = hermite_basis_deriv(t);
        Ok(d00 * self.y[i] / h + d10 * self.dy[i] + d01 * self.y[i + 1] / h + d11 * self.dy[i + 1])
    }

    /// Second derivative d²y/dx² of the interpolant at x.
    ///
    /// The Hermite cubic's curvature is exact for cubic data and O(h²)
    /// accurate on smooth curves — adequate for the small corrections
    /// (series coefficients near nodes) it feeds, not for primary values.
    pub fn second_derivative(&self, x: f64) -> Result<f64> {
        let i = self.segment(x)?;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (c00, c10, c01, c11) = (
            12.0 * t - 6.0,
            6.0 * t - 4.0,
            -12.0 * t + 6.0,
            6.0 * t - 2.0,
        );
        Ok(c00 * self.y[i] / (h * h)
            + c10 * self.dy[i] / h
            + c01 * self.y[i + 1] / (h * h)
            + c11 * self.dy[i + 1] / h)
    }

    /// Value and derivative in one segment lookup.
    pub fn value_and_derivative(&self, x: f64) -> Result<(f64, f64)> {
        let i = self.segment(x)?;
        let h = self.x[i + 1] - self.x[i];
        let t = (x - self.x[i]) / h;
        let (h00, h10, h01, h11) = hermite_basis(t);
        let (d00, d10, d01, d11) = hermite_basis_deriv(t);
        let v =
            h00 * self.y[i] + h10 * h * self.dy[i] + h01 * self.y[i + 1] + h11 * h * self.dy[i + 1];
        let d =
            d00 * self.y[i] / h + d10 * self.dy[i] + d01 * self.y[i + 1] / h + d11 * self.dy[i + 1];
        Ok((v, d))
    }
}

/// The four cubic Hermite basis polynomials at parameter t ∈ [0, 1].
fn hermite_basis(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    let t3 = t2 * t;
    (
        2.0 * t3 - 3.0 * t2 + 1.0,
        t3 - 2.0 * t2 + t,
        -2.0 * t3 + 3.0 * t2,
        t3 - t2,
    )
}

/// Derivatives of the Hermite basis with respect to t.
fn hermite_basis_deriv(t: f64) -> (f64, f64, f64, f64) {
    let t2 = t * t;
    (
        6.0 * t2 - 6.0 * t,
        3.0 * t2 - 4.0 * t + 1.0,
        -6.0 * t2 + 6.0 * t,
        3.0 * t2 - 2.0 * t,
    )
}
