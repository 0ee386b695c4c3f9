//! Benchmark topology generation for CNCAH networks: shape-script region
//! masks, rejection-sampled nodes, probabilistic edge sweeps, connectivity
//! repair and synthetic signal-strength readings.

mod gen;
mod shape;

pub use gen::{generate_topology, synthesize_rssi, GenParams, TopogenError};
pub use shape::{fixtures, parse_shape_script, region_contains, RegionMask, Shape, SignedShape};
