//! Shared numerical machinery: quadrature, root finding, ODE integration,
//! special functions, and interpolation tables.
//!
//! Everything here is deliberately self-contained and oblivious to quantum
//! mechanics; the physics layers above choose tolerances and handle the
//! near-singular structure (for example by subtracting pole terms before
//! handing integrands to [`quadrature::integrate_adaptive`]).

pub mod interp;
pub mod ode;
pub mod quadrature;
pub mod roots;
pub mod special;

pub use interp::CurveTable;
pub use ode::{integrate_ode, rk4_step, OdeSolution, StepControl};
pub use quadrature::{integrate_adaptive, Quadrature, QuadratureSpec};
pub use roots::find_root;
pub use special::{dawson, erfi, erfi_recip, ln_erfi, SQRT_PI};
