//! Monte Carlo laboratory for box-crossing estimates of planar sign fields.
//!
//! The crate is organised around four layers:
//!
//! - [`lattice`]: symmetric periodic triangulations with vertices in `Z^2`.
//! - [`topology`]: strongly simple paths, quads, crossings, annulus circuits.
//! - [`samplers`]: Bernoulli, Gaussian, Ising (perfect simulation) and coarse mixtures.
//! - [`estimators`]: crossing probabilities, non-gluing constants, coupling
//!   discrepancies and the closed-form bounds they are compared against.
//!
//! [`runner`] wires the layers into JSON-configured experiments.

pub mod error;
pub mod estimators;
pub mod lattice;
pub mod par;
pub mod rng;
pub mod runner;
pub mod samplers;
pub mod topology;

pub use error::{Error, Result};
pub use lattice::{Annulus, LatticeSpec, Vertex, VertexSet, Window};
pub use topology::{Configuration, Quad};
