//! End-to-end edge clustering: skeleton, hierarchy, condensation, extraction.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::dendrogram::{discrete_dendrogram, exact_dendrogram, Dendrogram, ThresholdSpec};
use crate::error::Result;
use crate::extraction::{compute_stability, condense, extract, ClusterAssignment, CondensedTree};
use crate::skeleton::{apply_cutoff, build_skeleton_from_incidence, LineGraphSkeleton, Weight};
use crate::temporal_graph::{build_incidence, DynamicMultigraph};

/// Skeletons with more edges than this use the discrete dendrogram under
/// [`DendrogramMode::Auto`].
pub const AUTO_EXACT_LIMIT: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum DendrogramMode {
    Exact,
    Discrete(ThresholdSpec),
    /// Exact up to [`AUTO_EXACT_LIMIT`] skeleton edges, discrete above.
    Auto(ThresholdSpec),
}

impl Default for DendrogramMode {
    fn default() -> Self {
        DendrogramMode::Auto(ThresholdSpec::default())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ClusterConfig {
    pub min_cluster_size: usize,
    pub mode: DendrogramMode,
    /// Drop skeleton edges with a larger time increment.
    pub cutoff: Option<Weight>,
}

impl Default for ClusterConfig {
    fn default() -> Self {
        ClusterConfig {
            min_cluster_size: 5,
            mode: DendrogramMode::default(),
            cutoff: None,
        }
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct PhaseTimings {
    pub phases: Vec<(String, Duration)>,
}

impl PhaseTimings {
    pub fn time<T>(&mut self, name: &str, f: impl FnOnce() -> T) -> T {
        let start = Instant::now();
        let out = f();
        self.phases.push((name.to_string(), start.elapsed()));
        out
    }

    pub fn total(&self) -> Duration {
        self.phases.iter().map(|(_, d)| *d).sum()
    }
}

#[derive(Debug, Clone)]
pub struct ClusterOutput {
    pub skeleton: LineGraphSkeleton,
    pub dendrogram: Dendrogram,
    pub tree: CondensedTree,
    pub assignment: ClusterAssignment,
    /// `true` when the exact hierarchy was built.
    pub exact: bool,
    pub timings: PhaseTimings,
}

/// Builds the skeleton of `g` (applying the cutoff, if any) and clusters it.
pub fn cluster_edges(g: &DynamicMultigraph, cfg: &ClusterConfig) -> Result<ClusterOutput> {
    let mut timings = PhaseTimings::default();
    let incidence = timings.time("incidence", || build_incidence(g));
    let skeleton = timings.time("skeleton", || build_skeleton_from_incidence(g, &incidence));
    drop(incidence);
    cluster_skeleton_timed(skeleton, cfg, timings)
}

/// Clusters a previously built skeleton.
pub fn cluster_skeleton(skeleton: LineGraphSkeleton, cfg: &ClusterConfig) -> Result<ClusterOutput> {
    cluster_skeleton_timed(skeleton, cfg, PhaseTimings::default())
}

fn cluster_skeleton_timed(
    skeleton: LineGraphSkeleton,
    cfg: &ClusterConfig,
    mut timings: PhaseTimings,
) -> Result<ClusterOutput> {
    let skeleton = match cfg.cutoff {
        Some(max) => timings.time("cutoff", || apply_cutoff(&skeleton, max)),
        None => skeleton,
    };
    let thresholds = match &cfg.mode {
        DendrogramMode::Exact => None,
        DendrogramMode::Discrete(spec) => Some(spec),
        DendrogramMode::Auto(spec) if skeleton.edges.len() > AUTO_EXACT_LIMIT => Some(spec),
        DendrogramMode::Auto(_) => None,
    };
    let exact = thresholds.is_none();
    let dendrogram = match thresholds {
        None => timings.time("dendrogram", || exact_dendrogram(&skeleton)),
        Some(spec) => {
            let ws = spec.resolve(&skeleton);
            timings.time("dendrogram", || discrete_dendrogram(&skeleton, &ws))?
        }
    };
    let mut tree = timings.time("condense", || condense(&dendrogram, cfg.min_cluster_size))?;
    timings.time("stability", || compute_stability(&mut tree));
    let assignment = timings.time("extract", || extract(&dendrogram, &mut tree));
    Ok(ClusterOutput {
        skeleton,
        dendrogram,
        tree,
        assignment,
        exact,
        timings,
    })
}
