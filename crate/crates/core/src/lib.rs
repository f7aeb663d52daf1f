//! Spectral analysis of soft and leaky quantum waveguides built along a
//! circular arc continued by two semi-lines.
//!
//! The crate is organised bottom-up:
//!
//! * [`geometry`]: the curve, its Frenet frame, parallel coordinates and the
//!   explicit cut-locus.
//! * [`transverse`]: one-dimensional cross-section operators, their ground
//!   states and the double-well comparison operator.
//! * [`variational`]: mollified test functions and the quadratic form whose
//!   negativity certifies a bound state below the transverse energy.
//! * [`sparse`], [`eigensolve`]: sparse symmetric storage and lowest-eigenpair
//!   solvers.
//! * [`hamiltonian2d`]: the discretised two-dimensional Hamiltonian and its
//!   spectral report.

pub mod eigensolve;
pub mod geometry;
pub mod hamiltonian2d;
pub mod quadrature;
pub mod sparse;
pub mod transverse;
pub mod variational;

pub(crate) mod linalg;

pub use geometry::{CutRadius, FermiCoordinate, PlanePoint, WaveguideGeometry};
pub use transverse::{TransverseGroundState, TransverseProfile};
