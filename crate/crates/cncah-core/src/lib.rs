//! Core graph and drawing types shared by the CNCAH toolkit: topologies,
//! unit-frame drawings, hop-count matrices, the on-disk graph format and a
//! portable deterministic RNG.

mod format;
mod frame;
mod graph;
mod hops;
mod rng;

pub use format::{parse_graph, serialize_graph, FormatError, GraphFile};
pub use frame::fit_to_frame;
pub use graph::{GraphError, NodeId, Point, Topology, VisualDrawing};
pub use hops::{hop_matrix, HopMatrix};
pub use rng::{mix_seed, SplitMix64};
