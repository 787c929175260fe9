//! Loewner evolution with a force point.
//!
//! The crate generates SLE_0(rho) curves from their closed-form driving
//! functions, solves the chordal and radial Loewner equations forward,
//! recovers driving functions from polylines (zipper), computes the
//! rho-Loewner energy by two independent routes together with its bound
//! certificates, integrates flow-line representations of the same curves,
//! simulates the SLE_kappa(rho) driving diffusions, and evaluates grid
//! Dirichlet energies of closed-form conformal maps.
//!
//! The two reference settings are the upper half-plane `(H; 0, inf)` with
//! half-plane-capacity parametrization and the unit disk `(D; 1, 0)` with
//! conformal-radius parametrization. Angles are kept unwrapped (real-valued)
//! throughout; consumers needing the unimodular radial driving compute
//! `e^{i w_t}` on demand.

pub mod dirichlet;
pub mod driving;
pub mod energy;
pub mod error;
pub mod flowline;
pub mod geom;
pub mod report;
pub mod sampler;
pub mod solve;
pub mod verify;
pub mod zipper;

pub use driving::{DrivingFunction, ForcePointSpec, Setting};
pub use energy::{BoundCertificate, EnergyReport};
pub use error::{Error, Result};
pub use flowline::{BranchState, FlowField};
pub use geom::{Curve, CurveSetting, Parametrization};
pub use sampler::{PathStats, SimulationConfig};
pub use solve::{LoewnerTrack, StopReason};
pub use zipper::ZipperResult;
