//! Developing the cut cap into the plane: cut-path developments, the
//! waterfall strip partition, the net layout and the overlap check.

pub mod net;
pub mod overlap;
pub mod path;
pub mod strips;

pub use net::{develop_strip, layout_net, rigid_mismatch, Net, StripLayout};
pub use overlap::{check_overlap, check_overlap_exhaustive, raster_overlap, OverlapPair, OverlapReport};
pub use path::{develop_chain, path_angles, turn_distortion, CutPath3D, DevelopedChain, Side};
pub use strips::{waterfall_strips, Boundary, BoundaryKind, Strip, StripPartition};

use crate::mesh::MeshError;
use crate::surface::SurfaceError;

#[derive(thiserror::Error, Debug, Clone, PartialEq)]
pub enum DevelopError {
    #[error("path needs at least two vertices")]
    ShortPath,
    #[error("path vertices {0} and {1} are not joined by an edge")]
    NotEdgePath(usize, usize),
    #[error("face {0} was never reached from the root face across uncut edges")]
    Disconnected(usize),
    #[error("degenerate waterfall: {0}")]
    Degenerate(String),
    #[error(transparent)]
    Mesh(#[from] MeshError),
    #[error(transparent)]
    Surface(#[from] SurfaceError),
}
