//! Dynamic frictional impact of 2D hyperelastic bodies against a rigid foundation.
//!
//! The crate implements a linear-triangle finite element discretization with an
//! energy-conserving midpoint time integrator. Contact with the foundation is
//! enforced through a normal compliance law with a semi-smooth Newton solver that
//! updates primal and dual variables together (primal-dual active set strategy).
//! Two normal laws are available: the standard power-law compliance and an
//! energy-consistent variant whose discrete contact work telescopes exactly, so
//! that a frictionless impact returns all stored contact energy on release.
//!
//! All quantities are SI (meters, seconds, kilograms, Pascals); the plane model
//! carries Pa-valued stresses per unit out-of-plane thickness.
//!
//! Module map:
//! - [`mesh`]: structured disk/annulus triangulations with tagged boundaries
//! - [`material`]: Saint Venant-Kirchhoff and compressible Ogden models plus the
//!   algorithmic (discrete-gradient) stress used by the integrator
//! - [`contact_geom`]: gap and tangential velocity against a rigid half-plane
//! - [`contact_law`]: normal compliance laws, Coulomb friction, active-set rules
//! - [`dynamics`]: mass/residual/tangent assembly for the midpoint scheme
//! - [`solver`]: the combined active-set/Newton time stepper
//! - [`diagnostics`]: energy bookkeeping, penetration tracking, CSV/VTK output
//! - [`scenario`]: config parsing, full runs, parameter sweeps

// Parameter checks are written `!(x > 0.0)` on purpose: the negated form
// rejects NaN along with the out-of-range values, which `x <= 0.0` would
// silently accept.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod contact_geom;
pub mod contact_law;
pub mod diagnostics;
pub mod dynamics;
pub mod material;
pub mod mesh;
pub mod scenario;
pub mod solver;
pub mod sparse;
