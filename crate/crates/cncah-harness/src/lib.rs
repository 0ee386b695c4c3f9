//! Experiment harness: runs a layout algorithm against a generated instance
//! whose true positions it never sees, scores the boundary nodes it detects
//! after every work unit, and sweeps whole benchmark configurations into
//! deterministic CSV reports.

mod bench;
mod experiment;
mod log;
mod score;

pub use bench::{
    bench, parse_bench_config, BenchConfig, BenchReport, BenchRow, RunConfig, BENCH_CSV_HEADER,
    SUMMARY_CSV_HEADER,
};
pub use experiment::{
    run_experiment, seeded_random_drawing, AlgorithmSpec, ExperimentResult, TerminationCriteria,
    TimeModel,
};
pub use log::{IterationLog, IterationRow, LOG_CSV_HEADER};
pub use score::{confusion, metrics, ConfusionCounts, Metrics};

use cncah_boundary::BoundaryError;
use cncah_core::{FormatError, GraphError};
use cncah_layout::LayoutError;
use cncah_topogen::TopogenError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid termination criteria: {0}")]
    InvalidCriteria(String),
    #[error("benchmark config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
    #[error(transparent)]
    Boundary(#[from] BoundaryError),
    #[error(transparent)]
    Topogen(#[from] TopogenError),
    #[error(transparent)]
    Shape(#[from] FormatError),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}
