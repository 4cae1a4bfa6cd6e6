//! Bipolar decomposition of one-dimensional stationary quantum states.
//!
//! Placeholder crate root while the layers are assembled bottom-up; the
//! full public API and examples catalog land with the physics modules.

pub mod bipolar;
pub mod config;
pub mod eigenstates;
pub mod error;
pub mod numerics;
pub mod potentials;
pub mod semiclassical;
pub mod trajectories;
pub mod unipolar;

pub use bipolar::{
    decompose, decompose_with, floyd_consistency_check, microstate_scan, verify_invariants,
    ActionIntegral, BipolarDecomposition, DecomposeOptions, InvariantCheck, InvariantReport,
    Microstate, PointEval,
};
pub use config::{AnchorMode, FluxMode, JobConfig, PotentialConfig, ScanConfig, StateSelector, TrajectoryConfig};
pub use eigenstates::{harmonic_state, level_in_window, solve_bound_state, Eigenstate, ShootingSpec};
pub use error::{Error, Result};
pub use potentials::Potential;
pub use semiclassical::{orbit_for_state, ClassicalOrbit, LmCurve};
pub use trajectories::{
    ensemble_starts, flow_equivalence, propagate_bipolar, propagate_semiclassical,
    propagate_unipolar, unipolar_stationarity_check, Sheet, Trajectory, TrajectoryLaw,
    TrajectorySample, UnipolarReport,
};
pub use unipolar::{classify_node, unipolar_of, NodeType, UnipolarDecomposition};
