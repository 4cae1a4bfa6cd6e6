//! Unipolar (single amplitude–phase) reference decomposition.
//!
//! A real stationary state written as one polar term Ψ = R·e^{iS/ħ} has
//! the trivial split S(x) ≡ 0, R(x) = Ψ(x) — *signed*, so R passes
//! smoothly through the nodes. The price of the single-term form is paid
//! elsewhere: the quantum potential
//!
//! ```text
//! Q(x) = −(ħ²/2m)·Ψ″/Ψ
//! ```
//!
//! must carry the entire x-dependence of the dynamics, and for an
//! eigenstate it does so in the most extreme way possible: Q = E − V(x)
//! identically, so the modified potential U = V + Q is the constant E.
//! Trajectories riding on a constant potential with zero phase gradient
//! do not move at all — the unipolar picture is stationary by
//! construction, which is exactly why a bipolar split is needed to
//! recover semiclassical motion.
//!
//! Nodes come in two kinds. At a *type-one* node Ψ″ vanishes along with Ψ
//! (every eigenstate node is an inflection point, since Ψ″ = gΨ), so Q
//! stays finite there by the limit Ψ‴/Ψ′. A *type-two* node has Ψ″ ≠ 0
//! and Q genuinely diverges; such nodes cannot occur in eigenstates but
//! do occur in generic superpositions. [`classify_node`] tells the two
//! apart numerically.
//!
//! The non-negative convention R_B = |R| (with S_B jumping by πħ across
//! nodes) is deliberately *not* adopted: it buys a positive amplitude at
//! the cost of cusps at every node, where the one-sided slopes of |R|
//! differ in sign.

use std::fmt;

use crate::eigenstates::Eigenstate;

/// Distance from a node (relative to 1 + |x|) inside which the quantum
/// potential switches to its l'Hôpital form Ψ‴/Ψ′. Outside, the direct
/// ratio Ψ″/Ψ is used; at this radius both forms agree to ~1e-8.
const NODE_LIMIT_RADIUS: f64 = 1e-8;

/// The two kinds of wavefunction nodes, distinguished by whether the
/// quantum potential stays finite across them.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NodeType {
    /// Ψ″ vanishes with Ψ: Q has a finite limit (all eigenstate nodes).
    TypeOne,
    /// Ψ″ ≠ 0 at the node: Q diverges there.
    TypeTwo,
}

impl fmt::Display for NodeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeType::TypeOne => write!(f, "type-one"),
            NodeType::TypeTwo => write!(f, "type-two"),
        }
    }
}

/// The unipolar view of one bound eigenstate.
#[derive(Debug, Clone)]
pub struct UnipolarDecomposition {
    state: Eigenstate,
    node_types: Vec<NodeType>,
}

/// Builds the unipolar decomposition of `state`, classifying each node
/// along the way (honestly, from Ψ itself — not by assuming the
/// eigenstate identity that makes them all type-one).
pub fn unipolar_of(state: &Eigenstate) -> UnipolarDecomposition {
    let node_types = state
        .nodes()
        .iter()
        .map(|&xj| classify_node(|x| state.psi(x), xj))
        .collect();
    UnipolarDecomposition {
        state: state.clone(),
        node_types,
    }
}

impl UnipolarDecomposition {
    /// The decomposed eigenstate.
    pub fn state(&self) -> &Eigenstate {
        &self.state
    }

    /// Signed amplitude R(x) = Ψ(x).
    pub fn amplitude(&self, x: f64) -> f64 {
        self.state.psi(x)
    }

    /// Phase S(x) ≡ 0 for a real stationary state.
    pub fn phase(&self, _x: f64) -> f64 {
        0.0
    }

    /// Quantum potential Q(x) = −(ħ²/2m)Ψ″/Ψ, continued through nodes by
    /// the limit −(ħ²/2m)Ψ‴/Ψ′.
    pub fn quantum_potential(&self, x: f64) -> f64 {
        let s = &self.state;
        let prefactor = -s.hbar() * s.hbar() / (2.0 * s.mass());
        if let Some(xj) = nearest_node(s.nodes(), x) {
            if (x - xj).abs() <= NODE_LIMIT_RADIUS * (1.0 + x.abs()) {
                return prefactor * s.dddpsi(x) / s.dpsi(x);
            }
        }
        prefactor * s.ddpsi(x) / s.psi(x)
    }

    /// Modified potential U(x) = V(x) + Q(x); the constant E for an
    /// eigenstate.
    pub fn modified_potential(&self, x: f64) -> f64 {
        self.state.potential().value(x) + self.quantum_potential(x)
    }

    /// Node classifications, aligned with `state().nodes()`.
    pub fn node_types(&self) -> &[NodeType] {
        &self.node_types
    }
}

/// Classifies a simple zero of `f` at `node` by whether the curvature
/// vanishes with the function. The symmetric second difference is probed
/// at two offsets: pure truncation error quarters when the offset halves,
/// while a genuine f″ survives. Curvature below ~1e-4 of the local slope
/// scale counts as vanishing.
pub fn classify_node<F: Fn(f64) -> f64>(f: F, node: f64) -> NodeType {
    let scale = 1.0 + node.abs();
    let d = 1e-3 * scale;
    let second = |d: f64| (f(node + d) + f(node - d) - 2.0 * f(node)) / (d * d);
    let slope = (f(node + d) - f(node - d)) / (2.0 * d);
    let coarse = second(d);
    let fine = second(0.5 * d);
    let floor = 1e-4 * slope.abs() / scale;
    if fine.abs() <= 0.35 * coarse.abs() + floor {
        NodeType::TypeOne
    } else {
        NodeType::TypeTwo
    }
}

/// The node closest to `x`, if any.
fn nearest_node(nodes: &[f64], x: f64) -> Option<f64> {
    if nodes.is_empty() {
        return None;
    }
    let i = nodes.partition_point(|&xj| xj < x);
    let right = nodes.get(i).copied();
    let left = if i > 0 { Some(nodes[i - 1]) } else { None };
    match (left, right) {
        (Some(l), Some(r)) => Some(if x - l <= r - x { l } else { r }),
        (Some(l), None) => Some(l),
        (None, r) => r,
    }
}
