//! Paths, quads, crossings and circuits on a triangulation.
//!
//! A quad `Q` is a strongly simple circuit split into four arcs
//! `(γ, γ₁, γ′, γ₂)` together with the vertices it encloses. A crossing of
//! `Q` is a strongly simple path in the interior joining a neighbour of `γ`
//! to a neighbour of `γ′` whose inner vertices avoid the neighbourhood of
//! the boundary; `Q` is glued when its dual `(γ₁, γ′, γ₂, γ)` is crossed.

mod annulus;
mod class;
mod clusters;
mod config;
mod crossing;
mod path;
mod quad;

pub use annulus::{surrounds_annulus, traverses};
pub use class::{quad_in_class, subquad_in_annulus, ClassMembership};
pub use clusters::{largest_cluster, sign_clusters};
pub use config::Configuration;
pub use crossing::{
    crossing_in_set, enumerate_crossings, explored_quad_glued, find_crossing, is_glued,
    jordan_split, leftmost_crossing, leftmost_crossing_in_set, region_below, tubular_frontier,
    validate_crossing,
};
pub use path::{is_strongly_simple, is_strongly_simple_circuit, loop_erase, StronglySimplePath};
pub use quad::{Arc, Quad};
