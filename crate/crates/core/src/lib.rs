//! Grammar-compressed index over moving-object trajectories on a grid.
//!
//! Periodic snapshots hold every object's cell in a k²-tree; between them,
//! per-object logs of movement codes are compressed by a shared grammar.

pub mod bytes;
pub mod dataset;
pub mod engine;
pub mod error;
pub mod geom;
pub mod grammar;
pub mod ingest;
pub mod k2tree;
pub mod log;
pub mod oracle;
pub mod snapshot;
pub mod spiral;
pub mod succinct;
pub mod synth;
pub mod workload;

pub use dataset::{Dataset, Segment, Trajectory};
pub use engine::{BuildOptions, IndexParams, IndexStats, Neighbor, QueryOptions, QueryStats, SnapshotChoice, TrajectoryIndex};
pub use error::{Error, Result};
pub use geom::{Point, Region};
pub use workload::{Answer, Query, QueryKind};
