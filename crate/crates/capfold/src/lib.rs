//! Edge-unfolding of nearly flat convex caps.
//!
//! The pipeline projects a non-obtusely triangulated convex cap to the
//! plane, grows a boundary-rooted spanning forest of angle-monotone paths,
//! cuts the forest, partitions the cap into angle-monotone strips, develops
//! everything into a planar net and certifies non-overlap together with the
//! intermediate invariants the construction relies on.

#![allow(clippy::needless_range_loop)]

pub mod develop;
pub mod fixtures;
pub mod forest;
pub mod gen;
pub mod geom;
pub mod mesh;
pub mod monotone;
pub mod pipeline;
pub mod report;
pub mod surface;
