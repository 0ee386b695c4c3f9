//! Force-directed layout for CNCAH topologies: the shared hop-count spring
//! model, three classical baselines (Kamada-Kawai, Fruchterman-Reingold,
//! Davidson-Harel) and the weighted multi-stage variant that detects and
//! unfolds folded regions.

mod dh;
mod fr;
mod fspl;
mod kk;
mod region;
mod spring;
mod wkkms;

pub use dh::{dh_layout, DhOptions};
pub use fr::{fr_layout, FrOptions};
pub use fspl::{fspl_distance, fspl_rssi, FsplError};
pub use kk::{kk_layout, KkOptions};
pub use region::{approx_error, est_region, FoldedRegionReport, Region};
pub use spring::{build_spring_model, delta, energy, gradient, newton_step, SpringModel};
pub use wkkms::{bwu, calweight, wkkms_layout, WeightMap, WkkmsParams};

use cncah_core::{GraphError, VisualDrawing};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum LayoutError {
    #[error("layout needs at least 2 nodes")]
    DegenerateGraph,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("invalid parameter: {0}")]
    InvalidParams(String),
    #[error("edge set is empty")]
    EmptyEdgeSet,
}

/// Final state of a layout run.
#[derive(Debug, Clone)]
pub struct LayoutState {
    pub drawing: VisualDrawing,
    /// Unweighted spring energy of `drawing` under the run's model.
    pub energy: f64,
    /// Work units consumed; one unit approximates one position update per
    /// node, making budgets comparable across algorithms.
    pub units: u64,
    pub rng_seed: u64,
}

/// Decision returned by a per-unit progress hook.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

/// Snapshot handed to the progress hook after each completed work unit.
#[derive(Debug)]
pub struct UnitReport<'a> {
    pub unit: u64,
    pub drawing: &'a VisualDrawing,
    /// Unweighted spring energy at this point.
    pub energy: f64,
}

/// Convenience hook that never stops a run.
pub fn run_to_budget(_: &UnitReport<'_>) -> Control {
    Control::Continue
}
