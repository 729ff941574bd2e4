//! Billiard dynamics on convex polytopes and smooth planar tables.
//!
//! The crate decides whether a polytope is an alcove (a fundamental domain of
//! an affine reflection group), classifies it by its affine Coxeter diagram,
//! simulates billiard trajectories by reflection, by unfolding and by folding
//! straight lines through the reflection group, analyses the corner limits of
//! planar wedges, and measures cone angles and geodesics on boundaries of
//! 3-polytopes.

pub mod alcove;
pub mod corner;
pub mod dynamics;
pub mod hull;
pub mod linalg;
pub mod par;
pub mod polytope;
pub mod smooth;
pub mod surface;
pub mod tables;

pub use polytope::{reflect, HalfSpace, Location, Point, Polytope, PolytopeError, Tolerances};
