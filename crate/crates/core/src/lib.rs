//! Edge clustering of timestamped directed multigraphs.
//!
//! Records that chain tip-to-tail in time are linked in a line graph whose
//! edge weights are time increments. Instead of materializing that graph,
//! [`skeleton::build_skeleton`] keeps only a minimum spanning tree per
//! vertex, which preserves every weight-filtered connected component. The
//! skeleton is then clustered hierarchically: a single-linkage dendrogram
//! (exact or at a ladder of thresholds), condensed under a minimum cluster
//! size, with clusters chosen by excess of mass.
//!
//! ```
//! use edgeclust::{cluster_edges, ClusterConfig, DynamicMultigraph};
//!
//! let g = DynamicMultigraph::from_triples([(1, 2, 0), (2, 3, 60), (3, 4, 90), (4, 5, 200), (5, 6, 260)]);
//! let out = cluster_edges(&g, &ClusterConfig::default()).unwrap();
//! assert_eq!(out.assignment.cluster_count, 1);
//! ```

pub mod analysis;
pub mod assignment_io;
pub mod dendrogram;
pub mod error;
pub mod extraction;
pub mod generate;
pub mod pipeline;
pub mod skeleton;
pub mod temporal_graph;
pub mod union_find;
pub mod verify;

pub use dendrogram::{Dendrogram, LevelPartition, ThresholdSpec};
pub use error::{Error, Result};
pub use extraction::{ClusterAssignment, CondensedTree, NOISE};
pub use pipeline::{cluster_edges, cluster_skeleton, ClusterConfig, ClusterOutput, DendrogramMode};
pub use skeleton::{LineGraphSkeleton, SkeletonEdge, Weight};
pub use temporal_graph::{DynamicMultigraph, EdgeRecord, InputFormat, Timestamp};

/// Runs `f` on a dedicated rayon pool with `workers` threads.
pub fn with_workers<T: Send>(workers: usize, f: impl FnOnce() -> T + Send) -> T {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .expect("thread pool")
        .install(f)
}
