//! Finite-element library for parabolic problems with dynamic boundary
//! conditions, written as constrained operator systems: bulk and surface
//! dynamics coupled through an explicit trace constraint enforced by a
//! Lagrange multiplier.
//!
//! The building blocks are:
//!
//! - [`mesh`]: interval and unit-square meshes, boundary extraction as an
//!   arc-length-parametrized curve mesh, independent (non-matching)
//!   multiplier meshes;
//! - [`assembly`]: P1 mass/stiffness operators in the bulk and on the
//!   boundary, trace and coupling matrices, load vectors;
//! - [`system`]: the three constrained formulations (Dirichlet, locally
//!   reacting, nonlocal) as block index-2 DAEs plus the unconstrained
//!   homogeneous baseline;
//! - [`saddle`]: direct and Schur-complement solvers for the symmetric
//!   indefinite step systems;
//! - [`timestep`]: implicit Euler and two-stage Radau IIA marching with the
//!   constraint collocated at stage end points;
//! - [`verify`]: manufactured-solution convergence studies, discrete inf-sup
//!   estimation in fractional boundary norms, multiplier-vs-flux comparison
//!   and the kernel-formulation cross-check;
//! - [`config`] / [`report`]: config-driven runs and deterministic artifacts.

pub mod assembly;
pub mod config;
pub mod error;
pub mod linalg;
pub mod mesh;
pub mod mms;
pub mod norms;
pub mod report;
pub mod saddle;
pub mod sparse;
pub mod system;
pub mod timestep;
pub mod verify;

pub use error::{Error, Result};
