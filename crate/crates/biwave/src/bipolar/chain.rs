//! Finite-part continuation of ∫ dx/ψ² through the nodes of a bound state.
//!
//! The bipolar phase is driven by the antiderivative J(x) of 1/ψ², which
//! has a simple pole at every node of ψ. A definite integral started on
//! one side of a node can never reach the other, yet the decomposition
//! needs one globally consistent J: the two traveling waves are a single
//! pair of solutions on the whole line, not a patchwork of per-interval
//! constructions. The classical resolution is the finite part. Near a
//! node x_j, with δ = x − x_j and ψ ≈ u₁δ(1 + e₁δ + e₂δ² + …),
//!
//! ```text
//! J(x) = A_j − 1/(u₁²δ) − ℓ_j ln|δ| + R_j(δ),
//! ```
//!
//! where R_j is the regular remainder with R_j(0) = 0, ℓ_j = u₂/u₁³ is a
//! weak logarithmic coefficient (identically zero for an exact solution of
//! the stationary equation, whose ψ″ = 2m(V−E)ψ/ħ² vanishes with ψ; kept
//! because interpolated states honor that identity only approximately),
//! and A_j is the finite part: the value the non-singular content of J
//! takes at the node itself. Continuity of J between consecutive poles
//! determines every A_j from a single anchor by ordinary quadrature along
//! node-free stretches — the chain this module builds.
//!
//! The anchor is either an off-node point where J vanishes, or a node
//! where the finite part itself vanishes. The latter is exactly the
//! symmetric-limits condition lim_{ε→0} [J(x_j+ε) + J(x_j−ε)] = 0, which
//! is what "the phase integral taken from the node" means once the
//! principal value is spelled out.
//!
//! # Evaluation zones
//!
//! Each node owns a zone of radius ρ_j (a fixed fraction of the distance
//! to its neighbors, capped by the local wavelength). Inside the zone J
//! comes from the pole representation; the remainder R_j is a short Taylor
//! series within the tiny series radius and a quadrature of the regular
//! hybrid integrand h = 1/ψ² − 1/(u₁²t²) + ℓ/t beyond it. Outside all
//! zones J is carried by quadrature of 1/ψ² from stored waypoints — the
//! zone-edge probe points whose J values were fixed while chaining.
//!
//! The module also assembles the combinations the decomposition actually
//! consumes: G = ψ·J and G′ = ψ′·J + 1/ψ, both finite through the nodes.
//! Near a node they are evaluated in regrouped form (the −ψ/(u₁²δ) product
//! becomes an explicit power series) because the two terms of G′ cancel
//! catastrophically there.

use crate::eigenstates::Eigenstate;
use crate::error::{Error, Result};
use crate::numerics::{integrate_adaptive, QuadratureSpec};

/// Fraction of the local scale a node's zone covers. Two neighboring
/// zones then take at most 0.7 of their shared gap, leaving a node-free
/// corridor for the chaining quadratures.
const ZONE_FRACTION: f64 = 0.35;

/// Series radius as a fraction of the local scale: analytic backends keep
/// it tight, tabulated ones widen it because an interpolant's ψ loses
/// relative accuracy sooner as the node is approached.
const SERIES_FRACTION_ANALYTIC: f64 = 1e-3;
const SERIES_FRACTION_TABULATED: f64 = 1e-2;

/// Anchor beneath which a requested off-node anchor is rejected as "on a
/// node", in units of the node's local scale.
const ANCHOR_EXCLUSION_FRACTION: f64 = 1e-9;

/// How the chain's single free constant is fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum ChainAnchor {
    /// J vanishes at this off-node point.
    Point(f64),
    /// The finite part A vanishes at the node with this index.
    Node(usize),
}

/// Everything the chain knows about one node of ψ.
#[derive(Debug, Clone)]
pub(crate) struct NodeData {
    /// Node position, Newton-refined so the pole sits on the numerical
    /// zero of ψ rather than the root locator's looser estimate.
    pub x: f64,
    /// ψ′ at the node.
    pub u1: f64,
    /// Shape ratios of ψ = u₁δ·(1 + e₁δ + e₂δ² + e₃δ³ + e₄δ⁴ + …).
    pub e: [f64; 4],
    /// Taylor coefficients of the regular integrand: h(t) ≈ d₀ + d₁t + d₂t².
    pub d: [f64; 3],
    /// Logarithmic pole coefficient ℓ = u₂/u₁³.
    pub ell: f64,
    /// Finite part of J at this node (fixed while chaining).
    pub a: f64,
    /// Taylor representation radius for R and the regrouped G-series.
    pub series_radius: f64,
    /// Pole-representation radius.
    pub zone_radius: f64,
}

/// J and the node-safe combinations at one point.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ChainEval {
    /// ψ(x).
    pub psi: f64,
    /// ψ′(x).
    pub dpsi: f64,
    /// J(x); ±∞ exactly on a node.
    pub big_j: f64,
    /// G = ψ·J, finite through nodes (−1/u₁ in the limit).
    pub g_val: f64,
    /// G′ = ψ′·J + 1/ψ, finite through nodes.
    pub dg_val: f64,
}

/// The chained finite-part antiderivative of 1/ψ² for one eigenstate.
#[derive(Debug, Clone)]
pub(crate) struct NodeChain {
    nodes: Vec<NodeData>,
    /// Waypoints (x, J) per region, sorted by x. Region i is the open
    /// interval between node i−1 and node i, so there are nodes.len()+1
    /// regions; the outermost ones stretch to ±∞.
    regions: Vec<Vec<(f64, f64)>>,
    quad: QuadratureSpec,
}

impl NodeChain {
    /// Builds the chain for `state`, fixing the constant via `anchor`.
    pub(crate) fn build(state: &Eigenstate, anchor: ChainAnchor) -> Result<Self> {
        // Tighter than the phase budget needs (errors enter the phase as
        // ΔJ·κ/(1+W²)), but loose enough to stay above the quadrature's
        // error-estimator floor, which scales with the integrand — 1/ψ² is
        // O(1)–O(10²) along the corridors even where the integral is tiny.
        let quad = QuadratureSpec {
            abs_tol: 2e-11,
            rel_tol: 2e-11,
            ..QuadratureSpec::default()
        };
        let series_fraction = if state.is_tabulated() {
            SERIES_FRACTION_TABULATED
        } else {
            SERIES_FRACTION_ANALYTIC
        };

        let positions = refine_nodes(state)?;
        let mut nodes = Vec::with_capacity(positions.len());
        for (j, &x) in positions.iter().enumerate() {
            let gap_left = if j > 0 { x - positions[j - 1] } else { f64::INFINITY };
            let gap_right = positions
                .get(j + 1)
                .map(|&r| r - x)
                .unwrap_or(f64::INFINITY);
            nodes.push(node_geometry(
                state,
                x,
                gap_left.min(gap_right),
                series_fraction,
            )?);
        }

        let mut chain = Self {
            nodes,
            regions: Vec::new(),
            quad,
        };
        chain.resolve_anchor(state, anchor)?;
        chain.build_regions(state, anchor)?;
        Ok(chain)
    }

    pub(crate) fn nodes(&self) -> &[NodeData] {
        &self.nodes
    }

    /// Number of nodes at or left of x.
    pub(crate) fn count_nodes_upto(&self, x: f64) -> usize {
        self.nodes.partition_point(|nd| nd.x <= x)
    }

    /// J together with ψ, ψ′ and the node-safe products at x.
    pub(crate) fn eval(&self, state: &Eigenstate, x: f64) -> Result<ChainEval> {
        let (psi, dpsi) = state.psi_and_dpsi(x);
        if let Some(j) = self.nearest_node(x) {
            let nd = &self.nodes[j];
            if (x - nd.x).abs() <= nd.zone_radius {
                return self.eval_in_zone(state, j, psi, dpsi, x);
            }
        }
        // Region path: quadrature of 1/ψ² from the nearest waypoint.
        let region = self.nodes.partition_point(|nd| nd.x < x);
        let &(wx, wj) = self.regions[region]
            .iter()
            .min_by(|a, b| {
                let da = (a.0 - x).abs();
                let db = (b.0 - x).abs();
                da.partial_cmp(&db).expect("waypoint distances are finite")
            })
            .expect("every region carries at least one waypoint");
        let q = integrate_adaptive(
            |t| {
                let p = state.psi(t);
                1.0 / (p * p)
            },
            wx,
            x,
            self.quad,
        )?;
        let big_j = wj + q.value;
        Ok(ChainEval {
            psi,
            dpsi,
            big_j,
            g_val: psi * big_j,
            dg_val: dpsi * big_j + 1.0 / psi,
        })
    }

    /// Convenience: just J(x).
    pub(crate) fn j_value(&self, state: &Eigenstate, x: f64) -> Result<f64> {
        Ok(self.eval(state, x)?.big_j)
    }

    fn nearest_node(&self, x: f64) -> Option<usize> {
        if self.nodes.is_empty() {
            return None;
        }
        let idx = self.nodes.partition_point(|nd| nd.x < x);
        let mut best = None;
        for cand in [idx.wrapping_sub(1), idx] {
            if let Some(nd) = self.nodes.get(cand) {
                match best {
                    None => best = Some(cand),
                    Some(b) => {
                        let db = (x - self.nodes[b].x).abs();
                        if (x - nd.x).abs() < db {
                            best = Some(cand);
                        }
                    }
                }
            }
        }
        best
    }

    /// Pole-representation evaluation for x inside node j's zone.
    fn eval_in_zone(
        &self,
        state: &Eigenstate,
        j: usize,
        psi: f64,
        dpsi: f64,
        x: f64,
    ) -> Result<ChainEval> {
        let nd = &self.nodes[j];
        let delta = x - nd.x;
        let r_val = self.remainder(state, j, delta)?;
        // ln|δ| is clamped away from the one representable point δ = 0,
        // where it only multiplies the (tiny or zero) coefficient ℓ.
        let lnc = delta.abs().max(1e-300).ln();
        let jreg = nd.a - nd.ell * lnc + r_val;
        let big_j = jreg - 1.0 / (nd.u1 * nd.u1 * delta);
        if delta.abs() <= nd.series_radius {
            // Regrouped: ψ/(u₁²δ) = (1/u₁)·shape(δ), with shape the local
            // form factor of ψ; this is what keeps G and G′ finite where
            // J and 1/ψ individually blow up.
            let [e1, e2, e3, e4] = nd.e;
            let shape = 1.0 + delta * (e1 + delta * (e2 + delta * (e3 + delta * e4)));
            let dshape = e1 + delta * (2.0 * e2 + delta * (3.0 * e3 + delta * 4.0 * e4));
            let rprime = nd.d[0] + delta * (nd.d[1] + delta * nd.d[2]);
            let g_val = psi * jreg - shape / nd.u1;
            let dg_val =
                dpsi * jreg + psi * rprime - nd.ell * nd.u1 * shape - dshape / nd.u1;
            Ok(ChainEval {
                psi,
                dpsi,
                big_j,
                g_val,
                dg_val,
            })
        } else {
            Ok(ChainEval {
                psi,
                dpsi,
                big_j,
                g_val: psi * big_j,
                dg_val: dpsi * big_j + 1.0 / psi,
            })
        }
    }

    /// R_j(δ): series inside the series radius, quadrature of the hybrid
    /// regular integrand beyond it.
    fn remainder(&self, state: &Eigenstate, j: usize, delta: f64) -> Result<f64> {
        let nd = &self.nodes[j];
        if delta.abs() <= nd.series_radius {
            return Ok(delta
                * (nd.d[0] + delta * (nd.d[1] / 2.0 + delta * nd.d[2] / 3.0)));
        }
        let q = integrate_adaptive(|t| hybrid_h(state, nd, t), 0.0, delta, self.quad)?;
        Ok(q.value)
    }

    /// J at a node's probe point δ = ±ρ from the pole representation.
    fn probe_j(&self, state: &Eigenstate, j: usize, delta: f64) -> Result<f64> {
        let nd = &self.nodes[j];
        let r_val = self.remainder(state, j, delta)?;
        Ok(nd.a - nd.ell * delta.abs().ln() + r_val - 1.0 / (nd.u1 * nd.u1 * delta))
    }

    /// The finite part consistent with a known J value at δ = ±ρ.
    fn finite_part_from(
        &self,
        state: &Eigenstate,
        j: usize,
        delta: f64,
        big_j: f64,
    ) -> Result<f64> {
        let nd = &self.nodes[j];
        let r_val = self.remainder(state, j, delta)?;
        Ok(big_j + 1.0 / (nd.u1 * nd.u1 * delta) + nd.ell * delta.abs().ln() - r_val)
    }

    /// Plain quadrature of 1/ψ² along a node-free stretch.
    fn span_integral(&self, state: &Eigenstate, from: f64, to: f64) -> Result<f64> {
        let q = integrate_adaptive(
            |t| {
                let p = state.psi(t);
                1.0 / (p * p)
            },
            from,
            to,
            self.quad,
        )?;
        Ok(q.value)
    }

    /// Fixes every finite part A_j from the anchor.
    fn resolve_anchor(&mut self, state: &Eigenstate, anchor: ChainAnchor) -> Result<()> {
        if self.nodes.is_empty() {
            return match anchor {
                ChainAnchor::Point(_) => Ok(()),
                ChainAnchor::Node(j) => Err(Error::Invalid(format!(
                    "anchor node index {j} requested but the state has no nodes"
                ))),
            };
        }
        let seed = match anchor {
            ChainAnchor::Node(j) => {
                if j >= self.nodes.len() {
                    return Err(Error::Invalid(format!(
                        "anchor node index {j} out of range: the state has {} nodes",
                        self.nodes.len()
                    )));
                }
                self.nodes[j].a = 0.0;
                j
            }
            ChainAnchor::Point(x0) => self.seed_from_point(state, x0)?,
        };
        // Sweep outward: each step links neighboring poles by quadrature
        // along the node-free corridor between their zones.
        for j in seed + 1..self.nodes.len() {
            let from = self.nodes[j - 1].x + self.nodes[j - 1].zone_radius;
            let to = self.nodes[j].x - self.nodes[j].zone_radius;
            let j_start = self.probe_j(state, j - 1, self.nodes[j - 1].zone_radius)?;
            let j_end = j_start + self.span_integral(state, from, to)?;
            self.nodes[j].a =
                self.finite_part_from(state, j, -self.nodes[j].zone_radius, j_end)?;
        }
        for j in (0..seed).rev() {
            let from = self.nodes[j + 1].x - self.nodes[j + 1].zone_radius;
            let to = self.nodes[j].x + self.nodes[j].zone_radius;
            let j_start = self.probe_j(state, j + 1, -self.nodes[j + 1].zone_radius)?;
            let j_end = j_start + self.span_integral(state, from, to)?;
            self.nodes[j].a =
                self.finite_part_from(state, j, self.nodes[j].zone_radius, j_end)?;
        }
        Ok(())
    }

    /// Seeds the sweep from an off-node anchor point: either the point
    /// lies in some node's zone (solve that node's finite part directly)
    /// or it reaches a neighboring probe by plain quadrature.
    fn seed_from_point(&mut self, state: &Eigenstate, x0: f64) -> Result<usize> {
        let j = self
            .nearest_node(x0)
            .expect("seed_from_point is only called when nodes exist");
        let nd = &self.nodes[j];
        let delta0 = x0 - nd.x;
        if delta0.abs() < ANCHOR_EXCLUSION_FRACTION * local_scale(nd) {
            return Err(Error::Invalid(format!(
                "anchor x₀ = {x0} coincides with the node at {}; the phase \
                 reference must sit strictly between nodes",
                nd.x
            )));
        }
        if delta0.abs() <= nd.zone_radius {
            // J(x₀) = 0 inside the zone fixes A_j in closed form.
            self.nodes[j].a = self.finite_part_from(state, j, delta0, 0.0)?;
            return Ok(j);
        }
        // x₀ sits in the open corridor; walk to the nearest node's probe.
        let (target, probe_delta) = if x0 < nd.x {
            (j, -nd.zone_radius)
        } else {
            (j, nd.zone_radius)
        };
        let probe_x = self.nodes[target].x + probe_delta;
        let j_probe = self.span_integral(state, x0, probe_x)?;
        self.nodes[target].a = self.finite_part_from(state, target, probe_delta, j_probe)?;
        Ok(target)
    }

    /// Stores the waypoints each region's quadratures start from.
    fn build_regions(&mut self, state: &Eigenstate, anchor: ChainAnchor) -> Result<()> {
        let mut regions = vec![Vec::new(); self.nodes.len() + 1];
        for j in 0..self.nodes.len() {
            let rho = self.nodes[j].zone_radius;
            let left = self.nodes[j].x - rho;
            let right = self.nodes[j].x + rho;
            let jl = self.probe_j(state, j, -rho)?;
            let jr = self.probe_j(state, j, rho)?;
            regions[j].push((left, jl));
            regions[j + 1].push((right, jr));
        }
        if let ChainAnchor::Point(x0) = anchor {
            let in_zone = self
                .nearest_node(x0)
                .map(|j| (x0 - self.nodes[j].x).abs() <= self.nodes[j].zone_radius)
                .unwrap_or(false);
            if !in_zone {
                let region = self.nodes.partition_point(|nd| nd.x < x0);
                regions[region].push((x0, 0.0));
            }
        }
        for r in &mut regions {
            r.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("waypoints are finite"));
        }
        self.regions = regions;
        Ok(())
    }
}

/// The regular integrand h = 1/ψ² − 1/(u₁²t²) + ℓ/t, evaluated by series
/// where the direct form would cancel catastrophically.
fn hybrid_h(state: &Eigenstate, nd: &NodeData, t: f64) -> f64 {
    if t.abs() < nd.series_radius {
        return nd.d[0] + t * (nd.d[1] + t * nd.d[2]);
    }
    let p = state.psi(nd.x + t);
    1.0 / (p * p) - 1.0 / (nd.u1 * nd.u1 * t * t) + nd.ell / t
}

/// The smaller of a node's neighbor gap and local wavelength — the scale
/// its zone and series radii are measured against.
fn local_scale(nd: &NodeData) -> f64 {
    nd.zone_radius / ZONE_FRACTION
}

/// Newton-polishes the state's node positions so each pole sits on the
/// numerical zero of ψ; a residual offset ε shifts the subtracted pole and
/// pollutes the remainder R by O(ε/δ²) at the series boundary.
fn refine_nodes(state: &Eigenstate) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(state.nodes().len());
    for &x0 in state.nodes() {
        let mut x = x0;
        for _ in 0..4 {
            let (p, dp) = state.psi_and_dpsi(x);
            if dp == 0.0 {
                break;
            }
            let step = p / dp;
            x -= step;
            if step.abs() <= 4.0 * f64::EPSILON * (1.0 + x.abs()) {
                break;
            }
        }
        if !x.is_finite() || (x - x0).abs() > 1e-3 * (1.0 + x0.abs()) {
            return Err(Error::Numerical(format!(
                "node refinement diverged near x = {x0}"
            )));
        }
        out.push(x);
    }
    Ok(out)
}

/// Local pole data at one (refined) node.
fn node_geometry(
    state: &Eigenstate,
    x: f64,
    neighbor_gap: f64,
    series_fraction: f64,
) -> Result<NodeData> {
    let u1 = state.dpsi(x);
    if u1 == 0.0 || !u1.is_finite() {
        return Err(Error::Numerical(format!(
            "degenerate node at x = {x}: ψ′ = {u1}"
        )));
    }
    let u2 = state.ddpsi(x);
    let m = state.mass();
    let hbar = state.hbar();
    let g = state.schroedinger_g(x);
    let scale = 2.0 * m / (hbar * hbar);
    let gp = scale * state.potential().derivative(x);
    let gpp = scale * state.potential().second_derivative(x);
    // Higher ψ-derivatives at the node follow from differentiating
    // ψ″ = gψ; the measured u₂ (zero for exact solutions) tags along.
    let u3 = g * u1;
    let u4 = 2.0 * gp * u1 + g * u2;
    let u5 = (3.0 * gpp + g * g) * u1 + 3.0 * gp * u2;
    let e1 = u2 / (2.0 * u1);
    let e2 = u3 / (6.0 * u1);
    let e3 = u4 / (24.0 * u1);
    let e4 = u5 / (120.0 * u1);
    let u1sq = u1 * u1;
    // Series of h = 1/ψ² − 1/(u₁²t²) + ℓ/t from (1 + z)⁻² with
    // z = e₁t + e₂t² + …
    let d0 = (3.0 * e1 * e1 - 2.0 * e2) / u1sq;
    let d1 = (-4.0 * e1.powi(3) + 6.0 * e1 * e2 - 2.0 * e3) / u1sq;
    let d2 = (5.0 * e1.powi(4) - 12.0 * e1 * e1 * e2 + 6.0 * e1 * e3 + 3.0 * e2 * e2
        - 2.0 * e4)
        / u1sq;
    let ell = u2 / (u1sq * u1);
    let wavelength = if g < 0.0 {
        2.0 * std::f64::consts::PI / (-g).sqrt()
    } else {
        f64::INFINITY
    };
    let scale_len = neighbor_gap.min(wavelength);
    if !scale_len.is_finite() {
        return Err(Error::Numerical(format!(
            "cannot set a pole scale at the node x = {x}: no neighbor gap \
             and no local wavelength"
        )));
    }
    Ok(NodeData {
        x,
        u1,
        e: [e1, e2, e3, e4],
        d: [d0, d1, d2],
        ell,
        a: f64::NAN,
        series_radius: series_fraction * scale_len,
        zone_radius: ZONE_FRACTION * scale_len,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bipolar::tables::ho_phase_tangent;
    use crate::eigenstates::harmonic_state;
    use crate::numerics::erfi;
    use std::f64::consts::{FRAC_PI_2, PI};

    /// Natural-unit κ for F = 1/(2π), m = ħ = 1.
    const KAPPA: f64 = 2.0 / PI;

    fn natural_state(n: usize) -> Eigenstate {
        harmonic_state(n, 1.0, 1.0, 1.0).expect("harmonic state")
    }

    /// Ground state: no nodes, so J is the plain running integral of
    /// 1/ψ₀², which evaluates to (π/2)·erfi in natural units.
    #[test]
    fn ground_state_j_is_scaled_erfi() {
        let state = natural_state(0);
        let chain = NodeChain::build(&state, ChainAnchor::Point(0.0)).unwrap();
        for x in [-2.5, -1.3, 0.4, 1.0, 2.2] {
            let j = chain.j_value(&state, x).unwrap();
            let reference = FRAC_PI_2 * erfi(x);
            assert!(
                (j - reference).abs() <= 1e-10 * (1.0 + reference.abs()),
                "J({x}) = {j}, (π/2)erfi = {reference}"
            );
        }
    }

    /// One node: the node-anchored chain must reproduce the closed-form
    /// tangent combination, W = κJ = T₁, on both sides of the pole and
    /// inside its zone.
    #[test]
    fn first_excited_matches_closed_form_tangent() {
        let state = natural_state(1);
        let chain = NodeChain::build(&state, ChainAnchor::Node(0)).unwrap();
        for x in [-1.8, -0.6, -0.05, 0.05, 0.3, 0.9, 1.8] {
            let w = KAPPA * chain.j_value(&state, x).unwrap();
            let t = ho_phase_tangent(1, x).unwrap();
            assert!(
                (w - t).abs() <= 1e-9 * (1.0 + t.abs()),
                "x = {x}: κJ = {w}, closed form {t}"
            );
        }
    }

    /// Four nodes: exercises the full A-chain (zone probes, corridor
    /// quadratures, both sweep directions) against the closed form.
    #[test]
    fn multi_node_chain_matches_closed_form_tangent() {
        let state = natural_state(4);
        let chain = NodeChain::build(&state, ChainAnchor::Point(0.0)).unwrap();
        for x in [-3.3, -2.2, -1.2, -0.3, 0.2, 0.55, 1.2, 2.2, 3.3] {
            let w = KAPPA * chain.j_value(&state, x).unwrap();
            let t = ho_phase_tangent(4, x).unwrap();
            assert!(
                (w - t).abs() <= 1e-9 * (1.0 + t.abs()),
                "x = {x}: κJ = {w}, closed form {t}"
            );
        }
    }

    /// The hybrid regular integrand's series must agree with its direct
    /// form where both are trustworthy.
    #[test]
    fn remainder_series_matches_direct_integrand() {
        let state = natural_state(4);
        let chain = NodeChain::build(&state, ChainAnchor::Point(0.0)).unwrap();
        for nd in chain.nodes() {
            for sign in [-1.0, 1.0] {
                let t = sign * 5.0 * nd.series_radius;
                let series = nd.d[0] + t * (nd.d[1] + t * nd.d[2]);
                let p = state.psi(nd.x + t);
                let direct = 1.0 / (p * p) - 1.0 / (nd.u1 * nd.u1 * t * t) + nd.ell / t;
                assert!(
                    (series - direct).abs() <= 1e-6 * (1.0 + direct.abs()),
                    "node {}: series {series} vs direct {direct} at t = {t}",
                    nd.x
                );
            }
        }
    }

    /// The series and quadrature representations of J, G, G′ agree where
    /// they hand over. A straddle across the seam would only measure J's
    /// genuine slope (1/ψ² is huge there), so instead both paths are
    /// evaluated at the *same* point by nudging the switch radius.
    #[test]
    fn representations_agree_at_their_seams() {
        let state = natural_state(4);
        let chain = NodeChain::build(&state, ChainAnchor::Point(0.0)).unwrap();
        for j in 0..chain.nodes().len() {
            let nd = chain.nodes()[j].clone();
            for sign in [-1.0, 1.0] {
                // Series seam: the same in-zone point through the Taylor
                // remainder and through the hybrid quadrature.
                let x = nd.x + sign * 0.999 * nd.series_radius;
                let series = chain.eval(&state, x).unwrap();
                let mut nudged = chain.clone();
                nudged.nodes[j].series_radius *= 0.99;
                let quad = nudged.eval(&state, x).unwrap();
                assert!(
                    (series.big_j - quad.big_j).abs()
                        <= 1e-9 * series.big_j.abs().max(1.0),
                    "J representations disagree at {x}: {} vs {}",
                    series.big_j,
                    quad.big_j
                );
                assert!(
                    (series.g_val - quad.g_val).abs()
                        <= 1e-9 * (1.0 + series.g_val.abs()),
                    "G representations disagree at {x}: {} vs {}",
                    series.g_val,
                    quad.g_val
                );
                assert!(
                    (series.dg_val - quad.dg_val).abs()
                        <= 1e-9 * (1.0 + series.dg_val.abs()),
                    "G′ representations disagree at {x}: {} vs {}",
                    series.dg_val,
                    quad.dg_val
                );

                // Zone seam: the same point through the pole representation
                // and through the region-waypoint quadrature.
                let x = nd.x + sign * 0.999 * nd.zone_radius;
                let pole = chain.eval(&state, x).unwrap();
                let mut nudged = chain.clone();
                nudged.nodes[j].zone_radius *= 0.99;
                let region = nudged.eval(&state, x).unwrap();
                assert!(
                    (pole.big_j - region.big_j).abs()
                        <= 1e-9 * pole.big_j.abs().max(1.0),
                    "J representations disagree at zone edge {x}: {} vs {}",
                    pole.big_j,
                    region.big_j
                );
                assert!(
                    (pole.dg_val - region.dg_val).abs()
                        <= 1e-9 * (1.0 + pole.dg_val.abs()),
                    "G′ representations disagree at zone edge {x}: {} vs {}",
                    pole.dg_val,
                    region.dg_val
                );
            }
        }
    }

    /// G and G′ stay finite and correct through the pole itself.
    #[test]
    fn node_safe_products_at_the_pole() {
        let state = natural_state(1);
        let chain = NodeChain::build(&state, ChainAnchor::Node(0)).unwrap();
        let nd = &chain.nodes()[0];
        let ev = chain.eval(&state, nd.x).unwrap();
        assert!(
            ev.big_j.is_infinite(),
            "J should be ±∞ exactly on the node, got {}",
            ev.big_j
        );
        let expected = -1.0 / nd.u1;
        assert!(
            (ev.g_val - expected).abs() <= 1e-10 * expected.abs(),
            "G at node: {} vs −1/u₁ = {expected}",
            ev.g_val
        );
        assert!(ev.dg_val.is_finite());
    }

    /// A node anchor means a vanishing finite part: the symmetric limit
    /// J(ε) + J(−ε) collapses to O(ε²).
    #[test]
    fn node_anchor_gives_symmetric_limits() {
        let state = natural_state(3);
        // Middle node of ψ₃ sits at the origin.
        let chain = NodeChain::build(&state, ChainAnchor::Node(1)).unwrap();
        let eps = 1e-4;
        let plus = chain.j_value(&state, eps).unwrap();
        let minus = chain.j_value(&state, -eps).unwrap();
        assert!(
            (plus + minus).abs() <= 1e-6,
            "symmetric-limit residual {} for the node anchor",
            plus + minus
        );
    }

    #[test]
    fn node_count_is_monotone_bookkeeping() {
        let state = natural_state(4);
        let chain = NodeChain::build(&state, ChainAnchor::Point(0.0)).unwrap();
        assert_eq!(chain.count_nodes_upto(-10.0), 0);
        assert_eq!(chain.count_nodes_upto(0.0), 2);
        assert_eq!(chain.count_nodes_upto(10.0), 4);
    }

    #[test]
    fn anchor_on_a_node_is_rejected() {
        let state = natural_state(2);
        let node = state.nodes()[1];
        let err = NodeChain::build(&state, ChainAnchor::Point(node)).unwrap_err();
        assert!(
            matches!(err, Error::Invalid(ref msg) if msg.contains("node")),
            "unexpected error: {err}"
        );
    }

    #[test]
    fn anchor_node_index_is_validated() {
        let state = natural_state(2);
        assert!(NodeChain::build(&state, ChainAnchor::Node(7)).is_err());
        let ground = natural_state(0);
        assert!(NodeChain::build(&ground, ChainAnchor::Node(0)).is_err());
    }
}
