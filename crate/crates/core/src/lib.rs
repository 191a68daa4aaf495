//! Symmetry-preserving reduced-order observers for Lie-group-invariant systems.
//!
//! - [`lie_group`]: SO(3) primitives on rotation matrices.
//! - [`symmetry`]: the generic observer construction (`β`, `α`, invariant
//!   error and its dynamics) plus numerical verifiers of its hypotheses.
//! - [`rigid_body`]: the SO(3)-invariant rigid-body velocity observer.
//! - [`simulation`]: coupled plant/observer integration, noise model,
//!   trajectory records and metrics.

pub mod lie_group;
pub mod rigid_body;
pub mod simulation;
pub mod suite;
pub mod symmetry;

pub use lie_group::{Rotation, Vec3};
