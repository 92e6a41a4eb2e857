//! Generating orbits of the planar circular restricted three-body
//! problem, and their continuation to positive mass ratios.
//!
//! The crate is organized around the path from closed-form two-body
//! geometry to certified periodic orbits:
//!
//! - [`kepler`]: ellipse geometry, rotating-frame energies and the
//!   Levi-Civita regularization quantities;
//! - [`lambert`]: elapsed times of arcs between unit-circle crossings,
//!   with an independent eccentric-anomaly oracle;
//! - [`arcs`]: timing-condition solves, closed-form actions, and the
//!   fixed-angle / fixed-axis / fixed-energy arc sequences;
//! - [`dynamics`]: the rotating-frame Hamiltonian flow with an adaptive
//!   embedded Runge-Kutta integrator, dense output and axis-crossing
//!   events;
//! - [`continuation`]: perpendicular shooting at fixed energy, orbit
//!   action by quadrature, winding numbers and the integer certificate
//!   `2 rot - w1 - w2`.

pub mod arcs;
pub mod continuation;
pub mod dynamics;
pub mod error;
pub mod kepler;
pub mod lambert;
pub mod rootfind;

mod dopri5;

pub use error::{Error, Result};
pub use kepler::{EllipseParams, Rotation};
