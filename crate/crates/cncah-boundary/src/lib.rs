//! True boundary-node identification for networks whose drawing is known:
//! split every edge crossing with a dummy node, walk the faces of the
//! resulting planar subdivision by angular order, and report the nodes of
//! the largest face.

mod faces;
mod split;

pub use faces::{boundary_nodes, traverse_faces, Face};
pub use split::{split_crossings, PlanarSubdivision};

use cncah_core::GraphError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BoundaryError {
    #[error("edges {0} and {1} overlap along a segment")]
    DegenerateGeometry(usize, usize),
    #[error(transparent)]
    Graph(#[from] GraphError),
}
